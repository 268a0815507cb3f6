"""Comparator tests: unscaled (UHT) and diagonal (DHT) Hotelling statistics
with resampling calibration (sign-flip for one-sample, label permutation for
two-sample)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import validate_sample_matrix
from .errors import ConfigError, DataValidationError


@dataclass(frozen=True)
class BaselineOutcome:
    statistic: float
    p_value: float
    method: str
    calibration: str
    n_resamples: int


def uht_statistic(x, mu0) -> float:
    """n * ||xbar - mu0||^2 (identity plug-in for the covariance)."""
    x = validate_sample_matrix(x, min_rows=1)
    u = x.mean(axis=0) - np.asarray(mu0, dtype=float)
    return float(x.shape[0] * (u @ u))


def dht_statistic(x, mu0) -> float:
    """n * sum_j (xbar_j - mu0_j)^2 / s_jj (diagonal plug-in)."""
    x = validate_sample_matrix(x, min_rows=2)
    s = x.var(axis=0, ddof=1)
    if np.any(s <= 0.0):
        j = int(np.nonzero(s <= 0.0)[0][0])
        raise DataValidationError(f"zero sample variance at coordinate {j}")
    u = x.mean(axis=0) - np.asarray(mu0, dtype=float)
    return float(x.shape[0] * np.sum(u * u / s))


def uht_statistic_two(x, y) -> float:
    """Two-sample unscaled analog: n1 n2 / N * ||xbar - ybar||^2."""
    x = validate_sample_matrix(x, min_rows=1)
    y = validate_sample_matrix(y, min_rows=1)
    n1, n2 = x.shape[0], y.shape[0]
    u = x.mean(axis=0) - y.mean(axis=0)
    return float(n1 * n2 / (n1 + n2) * (u @ u))


def dht_statistic_two(x, y) -> float:
    """Two-sample diagonal analog with the pooled per-coordinate variances."""
    x = validate_sample_matrix(x, min_rows=2)
    y = validate_sample_matrix(y, min_rows=2)
    n1, n2 = x.shape[0], y.shape[0]
    s = ((n1 - 1) * x.var(axis=0, ddof=1) + (n2 - 1) * y.var(axis=0, ddof=1)) / (n1 + n2 - 2)
    if np.any(s <= 0.0):
        j = int(np.nonzero(s <= 0.0)[0][0])
        raise DataValidationError(f"zero pooled variance at coordinate {j}")
    u = x.mean(axis=0) - y.mean(axis=0)
    return float(n1 * n2 / (n1 + n2) * np.sum(u * u / s))


def calibrate(statistic_fn, x, y=None, mu0=None, n_resamples: int = 199,
              seed: int = 0, method: str | None = None) -> BaselineOutcome:
    """Resampling calibration of a statistic.

    Two-sample mode (``y`` given) permutes the pooled group labels; one-sample
    mode flips observation signs around ``mu0`` (symmetry null).  The p-value
    uses the add-one estimator (1 + #{resampled >= observed}) / (R + 1).
    """
    if n_resamples < 99:
        raise ConfigError("n_resamples must be >= 99 for a usable p-value resolution")
    rng = np.random.default_rng(seed)
    x = validate_sample_matrix(x, min_rows=2)
    if y is not None:
        y = validate_sample_matrix(y, min_rows=2)
        observed = statistic_fn(x, y)
        pooled = np.vstack([x, y])
        n1 = x.shape[0]
        count = 0
        for _ in range(n_resamples):
            perm = rng.permutation(pooled.shape[0])
            stat = statistic_fn(pooled[perm[:n1]], pooled[perm[n1:]])
            count += stat >= observed
        calibration = "permutation"
    else:
        if mu0 is None:
            raise ConfigError("one-sample calibration needs mu0")
        mu0 = np.asarray(mu0, dtype=float)
        observed = statistic_fn(x, mu0)
        centered = x - mu0
        count = 0
        for _ in range(n_resamples):
            signs = rng.integers(0, 2, size=x.shape[0]) * 2 - 1
            stat = statistic_fn(mu0 + signs[:, None] * centered, mu0)
            count += stat >= observed
        calibration = "signflip"
    p_value = (1 + count) / (n_resamples + 1)
    return BaselineOutcome(
        statistic=float(observed), p_value=float(p_value),
        method=method or getattr(statistic_fn, "__name__", "statistic"),
        calibration=calibration, n_resamples=n_resamples,
    )
