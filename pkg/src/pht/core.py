"""Numerical substrate: Kendall's tau matrices, sufficient statistics for
leave-k-out covariance downdating, and closed-form 2x2 linear algebra.

All operations are pure functions of immutable inputs and safe to call
concurrently.  ``PairSummaries`` is built once per sample matrix and shared
read-only by the leave-out computations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataValidationError, InsufficientSampleError, SingularBlockError

#: Default relative singularity tolerance for 2x2 blocks, measured against
#: the geometric scale a11*a22.
EPS_REL_DEFAULT = 1e-12


def validate_sample_matrix(x, min_rows: int = 2) -> np.ndarray:
    """Coerce ``x`` to a float (n, p) matrix and check basic invariants."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise DataValidationError(f"sample matrix must be 2-dimensional, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DataValidationError("sample matrix contains NaN or Inf entries")
    if x.shape[0] < min_rows:
        raise InsufficientSampleError(
            f"need at least {min_rows} observations, got {x.shape[0]}"
        )
    return x


@dataclass(frozen=True)
class Cov2:
    """Symmetric 2x2 covariance block (denominator m-1 over m retained rows)."""

    a11: float
    a12: float
    a22: float

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a12


@dataclass(frozen=True)
class PairSummaries:
    """Sufficient statistics enabling O(1) leave-out downdates per exclusion.

    Stores the raw matrix alongside column sums; cross-products for a given
    column pair are formed on demand (one O(n) dot product) and the actual
    downdates are O(1) arithmetic on the sums.
    """

    x: np.ndarray  # (n, p), read-only
    col_sums: np.ndarray  # (p,)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @classmethod
    def from_matrix(cls, x) -> "PairSummaries":
        x = validate_sample_matrix(x)
        x = x.copy()
        x.setflags(write=False)
        return cls(x=x, col_sums=x.sum(axis=0))

    def cross_sum(self, i: int, j: int) -> float:
        """Full-sample sum of x_si * x_sj."""
        return float(self.x[:, i] @ self.x[:, j])


def kendall_tau_matrix(x) -> np.ndarray:
    """Kendall tau-a correlation matrix of the columns of ``x``.

    Entry (i, j) is (#concordant - #discordant) / (n(n-1)/2) over all
    observation pairs.  Ties contribute zero to the numerator while the
    denominator stays fixed at n(n-1)/2 (tau-a); the diagonal is set to
    exactly 1.  Being rank-based, the result is invariant under strictly
    increasing transforms of any column.
    """
    x = validate_sample_matrix(x, min_rows=2)
    n = x.shape[0]
    iu, il = np.triu_indices(n, k=1)
    # (m, p) matrix of pairwise difference signs per column, m = n(n-1)/2
    g = np.sign(x[iu, :] - x[il, :])
    m = n * (n - 1) // 2
    r = (g.T @ g) / m
    np.fill_diagonal(r, 1.0)
    return r


def leave2out_mean(summ: PairSummaries, j: int, excluded: tuple[int, int]) -> float:
    """Mean of column ``j`` with observations ``excluded=(s, t)`` removed."""
    s, t = excluded
    if s == t:
        raise DataValidationError("excluded observations must be distinct")
    n = summ.n
    if n < 3:
        raise InsufficientSampleError("leave-two-out mean needs n >= 3")
    return float((summ.col_sums[j] - summ.x[s, j] - summ.x[t, j]) / (n - 2))


def leave2out_cov2(
    summ: PairSummaries, pair: tuple[int, int], excluded: tuple[int, int]
) -> Cov2:
    """2x2 sample covariance of columns ``pair`` over the rows retained after
    removing observations ``excluded=(s, t)``; denominator n-3.
    """
    i, j = pair
    s, t = excluded
    if s == t:
        raise DataValidationError("excluded observations must be distinct")
    n = summ.n
    m = n - 2
    if m < 3:
        raise InsufficientSampleError(
            f"leave-two-out covariance needs n - 2 >= 3 retained rows, got {m}"
        )
    x = summ.x
    si = summ.col_sums[i] - x[s, i] - x[t, i]
    sj = summ.col_sums[j] - x[s, j] - x[t, j]
    gii = summ.cross_sum(i, i) - x[s, i] ** 2 - x[t, i] ** 2
    gjj = summ.cross_sum(j, j) - x[s, j] ** 2 - x[t, j] ** 2
    gij = summ.cross_sum(i, j) - x[s, i] * x[s, j] - x[t, i] * x[t, j]
    a11 = (gii - si * si / m) / (m - 1)
    a22 = (gjj - sj * sj / m) / (m - 1)
    a12 = (gij - si * sj / m) / (m - 1)
    return Cov2(a11=a11, a12=a12, a22=a22)


def invert_cov2(c: Cov2, eps_rel: float = EPS_REL_DEFAULT, pair=None) -> Cov2:
    """Exact adjugate/determinant inverse of a 2x2 covariance block.

    Raises ``SingularBlockError`` when det(c) <= eps_rel * a11 * a22; silent
    regularization would change the null law of the downstream statistics.
    """
    det = c.det
    if det <= eps_rel * abs(c.a11 * c.a22):
        raise SingularBlockError(
            f"near-singular 2x2 block (det={det:.3e}) for pair {pair}", pair=pair
        )
    return Cov2(a11=c.a22 / det, a12=-c.a12 / det, a22=c.a11 / det)
