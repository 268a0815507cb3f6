"""Vectorized leave-out covariance grids.

These helpers turn the O(1)-per-exclusion downdating arithmetic into whole
(n, n) numpy grids per covariance entry, so the U-statistic double sums over
excluded observation pairs cost a handful of array operations per screened
block instead of a Python loop over exclusions.

Conventions:
  - "loo2" grids have shape (k, n, n); entry [b, s, t] is the statistic with
    observations s and t removed.  The diagonal s == t is not a valid
    exclusion and is masked where it matters.
  - "loo1" grids have shape (k, n); entry [b, s] removes observation s only.
  - k indexes a batch of column-index pairs.
"""

from __future__ import annotations

import numpy as np

from .core import EPS_REL_DEFAULT
from .errors import SingularBlockError

# Batch size for screened blocks; bounds peak memory at roughly
# CHUNK * n^2 * 8 bytes per temporary grid.
CHUNK = 64


def loo2_cov_entries(x: np.ndarray, I: np.ndarray, J: np.ndarray) -> np.ndarray:
    """(k, n, n) grids of leave-two-out covariance entries cov(col I, col J).

    Denominator is (n-2)-1 = n-3 over the retained rows.
    """
    n = x.shape[0]
    m = n - 2
    xi = x[:, I].T  # (k, n)
    xj = x[:, J].T
    w = xi * xj
    g = w.sum(axis=1)
    G = g[:, None, None] - w[:, :, None] - w[:, None, :]
    Si = xi.sum(axis=1)[:, None, None] - xi[:, :, None] - xi[:, None, :]
    Sj = xj.sum(axis=1)[:, None, None] - xj[:, :, None] - xj[:, None, :]
    return (G - Si * Sj / m) / (m - 1)


def loo2_mean_entries(x: np.ndarray, I: np.ndarray) -> np.ndarray:
    """(k, n, n) grids of leave-two-out column means for columns ``I``."""
    n = x.shape[0]
    xi = x[:, I].T
    Si = xi.sum(axis=1)[:, None, None] - xi[:, :, None] - xi[:, None, :]
    return Si / (n - 2)


def loo1_cov_entries(x: np.ndarray, I: np.ndarray, J: np.ndarray) -> np.ndarray:
    """(k, n) vectors of leave-one-out covariance entries; denominator n-2."""
    n = x.shape[0]
    m = n - 1
    xi = x[:, I].T
    xj = x[:, J].T
    w = xi * xj
    G = w.sum(axis=1)[:, None] - w
    Si = xi.sum(axis=1)[:, None] - xi
    Sj = xj.sum(axis=1)[:, None] - xj
    return (G - Si * Sj / m) / (m - 1)


def invert_block_grids(a11, a12, a22, *, pairs=None, eps_rel=EPS_REL_DEFAULT,
                       mask_diagonal=False):
    """Elementwise 2x2 inverses of block-entry grids.

    ``a11, a12, a22`` share a common shape whose leading axis indexes blocks.
    With ``mask_diagonal`` the [s, s] cells (invalid exclusions) are excluded
    from the singularity check and zeroed in the output so they never
    contribute to an accumulated sum.
    """
    det = a11 * a22 - a12 * a12
    scale = np.abs(a11 * a22)
    bad = det <= eps_rel * scale
    if mask_diagonal:
        diag = np.eye(a11.shape[-1], dtype=bool)
        bad = bad & ~diag
    if bad.any():
        idx = tuple(int(v[0]) for v in np.nonzero(bad))
        pair = pairs[idx[0]] if pairs is not None else None
        raise SingularBlockError(
            f"near-singular leave-out 2x2 block at index {idx}", pair=pair,
            excluded=idx[1:],
        )
    if mask_diagonal:
        det = det.copy()
        det[..., diag] = 1.0
    b11 = a22 / det
    b12 = -a12 / det
    b22 = a11 / det
    if mask_diagonal:
        b11[..., diag] = 0.0
        b12[..., diag] = 0.0
        b22[..., diag] = 0.0
    return b11, b12, b22


def invert_scalar_grids(v, *, singles=None, eps=0.0, mask_diagonal=False):
    """Elementwise reciprocals of variance grids with positivity checks."""
    bad = v <= eps
    if mask_diagonal:
        diag = np.eye(v.shape[-1], dtype=bool)
        bad = bad & ~diag
    if bad.any():
        idx = tuple(int(w[0]) for w in np.nonzero(bad))
        coord = singles[idx[0]] if singles is not None else None
        raise SingularBlockError(
            f"non-positive leave-out variance at index {idx}", pair=coord,
            excluded=idx[1:],
        )
    if mask_diagonal:
        v = v.copy()
        v[..., diag] = 1.0
    inv = 1.0 / v
    if mask_diagonal:
        inv[..., diag] = 0.0
    return inv


def chunked(k: int, size: int = CHUNK):
    """Yield (lo, hi) index ranges covering range(k)."""
    for lo in range(0, k, size):
        yield lo, min(lo + size, k)
