"""Correlation screening: split the p covariates into strongly correlated
pairs and weakly correlated singletons from a Kendall-tau threshold."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Cov2
from .errors import ConfigError, InternalConsistencyError


@dataclass(frozen=True)
class ScreeningSets:
    """Pair set and singleton set induced by a tau threshold.

    ``pairs`` holds (i, j) with i < j, sorted; ``singles`` holds the
    coordinates whose every off-diagonal |tau| is <= tau0.  Together they
    cover every coordinate exactly once in the singles/pairs sense: no
    singleton coordinate appears in any pair.
    """

    pairs: tuple[tuple[int, int], ...]
    singles: tuple[int, ...]
    tau0: float

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    @property
    def n_singles(self) -> int:
        return len(self.singles)

    def covered(self, p: int) -> np.ndarray:
        """Boolean coverage vector over coordinates 0..p-1."""
        cov = np.zeros(p, dtype=bool)
        for i, j in self.pairs:
            cov[i] = cov[j] = True
        cov[list(self.singles)] = True
        return cov


def _screen_abs(abs_tau: np.ndarray, tau0: float) -> ScreeningSets:
    p = abs_tau.shape[0]
    a = abs_tau.copy()
    np.fill_diagonal(a, 0.0)
    iu, ju = np.triu_indices(p, k=1)
    hit = a[iu, ju] > tau0
    pairs = tuple(zip(iu[hit].tolist(), ju[hit].tolist()))
    # Equality tau_ij == tau0 routes to the uncorrelated path: a coordinate
    # is a singleton unless some strict exceedance pulls it into a pair.
    in_pair = a.max(axis=1) > tau0 if p > 1 else np.zeros(p, dtype=bool)
    singles = tuple(np.nonzero(~in_pair)[0].tolist())
    return ScreeningSets(pairs=pairs, singles=singles, tau0=float(tau0))


def screen(tau: np.ndarray, tau0: float) -> ScreeningSets:
    """One-sample screening on a Kendall tau matrix.

    pairs = {(i, j): |r_ij| > tau0, i < j};
    singles = {i: |r_ij| <= tau0 for all j != i}.
    """
    if not 0.0 <= tau0 <= 1.0:
        raise ConfigError(f"tau0 must be in [0, 1], got {tau0}")
    return _screen_abs(np.abs(np.asarray(tau, dtype=float)), tau0)


def screen_two_sample(
    tau1: np.ndarray, tau2: np.ndarray, n1: int, n2: int, tau0: float
) -> ScreeningSets:
    """Two-sample screening on the sample-size-weighted absolute-tau average
    (n1*|r_ij,1| + n2*|r_ij,2|) / (n1 + n2).
    """
    if not 0.0 <= tau0 <= 1.0:
        raise ConfigError(f"tau0 must be in [0, 1], got {tau0}")
    if n1 < 2 or n2 < 2:
        raise ConfigError("both group sizes must be >= 2")
    combined = (n1 * np.abs(np.asarray(tau1, dtype=float))
                + n2 * np.abs(np.asarray(tau2, dtype=float))) / (n1 + n2)
    return _screen_abs(combined, tau0)


@dataclass(frozen=True)
class ProjectorBlocks:
    """Inverse blocks backing the block-sparse projector: one 2x2 inverse per
    screened pair plus one reciprocal variance per singleton.  The implied
    p x p operator is never materialized."""

    pair_inv: dict[tuple[int, int], Cov2] = field(default_factory=dict)
    single_inv: dict[int, float] = field(default_factory=dict)


def projector_quadratic(
    sets: ScreeningSets, blocks: ProjectorBlocks, u: np.ndarray, v: np.ndarray
) -> float:
    """u^T P v for the block-sparse projector implied by ``sets``/``blocks``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    total = 0.0
    for pair in sets.pairs:
        if pair not in blocks.pair_inv:
            raise InternalConsistencyError(f"missing inverse block for pair {pair}")
        b = blocks.pair_inv[pair]
        i, j = pair
        total += (b.a11 * u[i] * v[i] + b.a12 * (u[i] * v[j] + u[j] * v[i])
                  + b.a22 * u[j] * v[j])
    for i in sets.singles:
        if i not in blocks.single_inv:
            raise InternalConsistencyError(f"missing reciprocal for coordinate {i}")
        total += u[i] * v[i] * blocks.single_inv[i]
    return float(total)
