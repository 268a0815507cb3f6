"""Result container shared by the one- and two-sample tests."""

from __future__ import annotations

from dataclasses import dataclass, asdict


@dataclass(frozen=True)
class TestOutcome:
    """Outcome of a standardized pairwise Hotelling test.

    ``z`` is the statistic divided by its estimated null scale and
    ``p_value`` is the one-sided upper-tail normal probability 1 - Phi(z).
    """

    statistic: float
    trace_hat: float
    z: float
    p_value: float
    tau0_used: float
    n_pairs: int
    n_singles: int
    alpha: float
    reject: bool

    def to_dict(self) -> dict:
        return asdict(self)
