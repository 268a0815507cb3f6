"""Data-driven threshold selection by maximizing the empirical
signal-to-noise ratio over a grid, via repeated subsampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import kendall_tau_matrix, validate_sample_matrix
from .errors import ConfigError, DataValidationError, DegenerateVarianceError, SingularBlockError
from .one_sample import t1_and_trace
from .screening import screen, screen_two_sample
from .two_sample import t2_and_trace

DEFAULT_GRID = (0.7, 0.8, 0.9, 1.0)


@dataclass(frozen=True)
class TauSelectConfig:
    grid: tuple[float, ...] = DEFAULT_GRID
    b_reps: int = 10
    subsample_fraction: float = 2.0 / 3.0
    seed: int = 0

    def validate(self) -> None:
        g = list(self.grid)
        if not g or any(not 0.0 <= t <= 1.0 for t in g):
            raise ConfigError("grid values must lie in [0, 1]")
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ConfigError("grid must be strictly increasing")
        if self.b_reps < 1:
            raise ConfigError("b_reps must be >= 1")
        if not 0.0 < self.subsample_fraction <= 1.0:
            raise ConfigError("subsample_fraction must be in (0, 1]")


def snr_hat_one(x, mu0, tau0: float) -> float:
    """Empirical signal-to-noise ratio: statistic over root trace estimate."""
    x = validate_sample_matrix(x, min_rows=5)
    sets = screen(kendall_tau_matrix(x), tau0)
    t1, tr = t1_and_trace(x, mu0, sets)
    return t1 / np.sqrt(tr)


def snr_hat_two(x, y, tau0: float) -> float:
    """Two-sample empirical signal-to-noise ratio."""
    x = validate_sample_matrix(x, min_rows=5)
    y = validate_sample_matrix(y, min_rows=5)
    sets = screen_two_sample(kendall_tau_matrix(x), kendall_tau_matrix(y),
                             x.shape[0], y.shape[0], tau0)
    t2, tr = t2_and_trace(x, y, sets)
    return t2 / np.sqrt(tr)


def _argmax_largest(grid, values):
    """Index of the maximum; ties break toward the largest threshold."""
    best = None
    for k, v in enumerate(values):
        if v is None:
            continue
        if best is None or v >= values[best]:
            best = k
    return best


def select_tau0(x, y=None, mu0=None, cfg: TauSelectConfig | None = None) -> float:
    """Pick a threshold from the grid by subsampled SNR maximization.

    For each of B repetitions a subsample is drawn without replacement and
    the grid point maximizing the empirical SNR on that subsample is kept;
    the reported threshold is the lower median of the B winners.  Grid points
    whose statistics are numerically degenerate on a subsample are skipped
    for that repetition.
    """
    cfg = cfg if cfg is not None else TauSelectConfig()
    cfg.validate()
    x = validate_sample_matrix(x, min_rows=2)
    two_sample = y is not None
    if two_sample:
        y = validate_sample_matrix(y, min_rows=2)
        if x.shape[1] != y.shape[1]:
            raise DataValidationError("groups must share dimensionality")
    elif mu0 is None:
        raise ConfigError("one-sample selection needs mu0")

    n1 = x.shape[0]
    n1_sub = int(np.floor(cfg.subsample_fraction * n1))
    if n1_sub < 5:
        raise ConfigError(
            f"subsample of {n1_sub} rows is too small for the leave-out statistics"
        )
    if two_sample:
        n2 = y.shape[0]
        n2_sub = int(np.floor(cfg.subsample_fraction * n2))
        if n2_sub < 5:
            raise ConfigError(
                f"subsample of {n2_sub} rows is too small for the leave-out statistics"
            )

    winners = []
    for b in range(cfg.b_reps):
        rng = np.random.default_rng([cfg.seed, b])
        idx1 = rng.choice(n1, size=n1_sub, replace=False)
        xs = x[idx1]
        if two_sample:
            idx2 = rng.choice(n2, size=n2_sub, replace=False)
            ys = y[idx2]
        values = []
        for tau0 in cfg.grid:
            try:
                if two_sample:
                    values.append(snr_hat_two(xs, ys, tau0))
                else:
                    values.append(snr_hat_one(xs, mu0, tau0))
            except (DegenerateVarianceError, SingularBlockError):
                values.append(None)
        best = _argmax_largest(cfg.grid, values)
        if best is None:
            raise DegenerateVarianceError(
                f"every grid point was degenerate on subsample repetition {b}"
            )
        winners.append(cfg.grid[best])

    winners.sort()
    # Lower median: stays on the grid for even B as well.
    return float(winners[(len(winners) + 1) // 2 - 1])
