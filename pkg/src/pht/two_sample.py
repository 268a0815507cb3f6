"""Two-sample pairwise Hotelling test with pooled leave-out covariances."""

from __future__ import annotations

import numpy as np
from scipy.stats import norm

from . import _grids
from .core import EPS_REL_DEFAULT, kendall_tau_matrix, validate_sample_matrix
from .errors import ConfigError, DataValidationError, DegenerateVarianceError, SingularBlockError
from .one_sample import _quad_grid, population_projector, trace_lambda_sq
from .outcome import TestOutcome
from .screening import ScreeningSets, screen_two_sample


def phi_factor(n1: int, n2: int) -> float:
    """Variance combination factor 2/{n1(n1-1)} + 2/{n2(n2-1)} + 4/(n1 n2)."""
    if n1 < 2 or n2 < 2:
        raise ConfigError("phi_factor needs n1, n2 >= 2")
    return 2.0 / (n1 * (n1 - 1)) + 2.0 / (n2 * (n2 - 1)) + 4.0 / (n1 * n2)


def _validate_groups(x, y, min_rows):
    x = validate_sample_matrix(x, min_rows=min_rows)
    y = validate_sample_matrix(y, min_rows=min_rows)
    if x.shape[1] != y.shape[1]:
        raise DataValidationError(
            f"groups must share dimensionality, got p={x.shape[1]} and p={y.shape[1]}"
        )
    return x, y


def statistic_w2(x, y, eps_rel: float = EPS_REL_DEFAULT) -> float:
    """All-pairs quadratic form in (xbar - ybar) with the pooled covariance
    [(n1-1)S1 + (n2-1)S2] / (N-2)."""
    x, y = _validate_groups(x, y, min_rows=2)
    n1, p = x.shape
    n2 = y.shape[0]
    if p < 2:
        raise DataValidationError("the all-pairs statistic needs p >= 2")
    N = n1 + n2
    if N - 2 < 3:
        raise DataValidationError("pooled covariance needs n1 + n2 - 2 >= 3")
    S = ((n1 - 1) * np.cov(x, rowvar=False) + (n2 - 1) * np.cov(y, rowvar=False)) / (N - 2)
    u = x.mean(axis=0) - y.mean(axis=0)
    d = np.diag(S).copy()
    det = np.outer(d, d) - S * S
    iu, ju = np.triu_indices(p, k=1)
    bad = det[iu, ju] <= eps_rel * np.abs(np.outer(d, d))[iu, ju]
    if bad.any():
        k = int(np.nonzero(bad)[0][0])
        raise SingularBlockError(
            f"singular pooled block for pair ({iu[k]}, {ju[k]})",
            pair=(int(iu[k]), int(ju[k])),
        )
    usq = u * u
    num = np.outer(usq, d) + np.outer(d, usq) - 2.0 * S * np.outer(u, u)
    return float((N / (n1 * n2)) * (num[iu, ju] / det[iu, ju]).sum())


def _within_group_grids(a_own, b_other_entry, n_own, n_other, alt_pool_weights):
    """Pooled leave-two-out block entries for a within-group term.

    ``a_own`` is the (k, n, n) leave-two-out covariance grid of the group that
    loses two observations; ``b_other_entry`` the (k,) full-sample covariance
    entries of the other group.  Default weights follow the asymmetric pooled
    construction (n_own - 2) * S_own^{(s,t)} + n_other * S_other; the optional
    toggle swaps the second weight for (n_other - 1).
    """
    N = n_own + n_other
    w_other = (n_other - 1) if alt_pool_weights else n_other
    return ((n_own - 2) * a_own + w_other * b_other_entry[:, None, None]) / (N - 2)


def _two_sample_grids(x, y, sets, eps_rel, want_stat, want_trace, alt_pool_weights):
    n1, p = x.shape
    n2 = y.shape[0]
    S1 = np.cov(x, rowvar=False).reshape(p, p)
    S2 = np.cov(y, rowvar=False).reshape(p, p)

    Qx = np.zeros((n1, n1)) if want_stat else None
    Qy = np.zeros((n2, n2)) if want_stat else None
    Qc = np.zeros((n1, n2)) if want_stat else None
    q1x = np.zeros((n1, n1)) if want_trace else None
    q1y = np.zeros((n2, n2)) if want_trace else None

    def accumulate(I, J, is_pair, pair_labels):
        nonlocal Qx, Qy, Qc, q1x, q1y
        for own, n_own, n_other, Q, q1, S_other in (
            (x, n1, n2, Qx, q1x, S2),
            (y, n2, n1, Qy, q1y, S1),
        ):
            if is_pair:
                a11 = _within_group_grids(_grids.loo2_cov_entries(own, I, I),
                                          S_other[I, I], n_own, n_other, alt_pool_weights)
                a12 = _within_group_grids(_grids.loo2_cov_entries(own, I, J),
                                          S_other[I, J], n_own, n_other, alt_pool_weights)
                a22 = _within_group_grids(_grids.loo2_cov_entries(own, J, J),
                                          S_other[J, J], n_own, n_other, alt_pool_weights)
                b11, b12, b22 = _grids.invert_block_grids(
                    a11, a12, a22, pairs=pair_labels, eps_rel=eps_rel, mask_diagonal=True
                )
                oi = own[:, I].T
                oj = own[:, J].T
                if want_stat:
                    Q += _quad_grid(b11, b12, b22, oi, oj, oi, oj)
                if want_trace:
                    Ui = oi[:, :, None] - _grids.loo2_mean_entries(own, I)
                    Uj = oj[:, :, None] - _grids.loo2_mean_entries(own, J)
                    q1 += (b11 * Ui * oi[:, None, :]
                           + b12 * (Ui * oj[:, None, :] + Uj * oi[:, None, :])
                           + b22 * Uj * oj[:, None, :]).sum(axis=0)
            else:
                v = _within_group_grids(_grids.loo2_cov_entries(own, I, I),
                                        S_other[I, I], n_own, n_other, alt_pool_weights)
                inv = _grids.invert_scalar_grids(v, singles=I, mask_diagonal=True)
                os_ = own[:, I].T
                if want_stat:
                    Q += np.einsum("kst,ks,kt->st", inv, os_, os_, optimize=True)
                if want_trace:
                    Us = os_[:, :, None] - _grids.loo2_mean_entries(own, I)
                    q1 += (inv * Us * os_[:, None, :]).sum(axis=0)

        if want_stat:
            # Cross term: each (s, t) drops one observation per group.
            N = n1 + n2
            c1 = _grids.loo1_cov_entries(x, I, J)  # (k, n1)
            c2 = _grids.loo1_cov_entries(y, I, J)  # (k, n2)
            if is_pair:
                c1ii = _grids.loo1_cov_entries(x, I, I)
                c1jj = _grids.loo1_cov_entries(x, J, J)
                c2ii = _grids.loo1_cov_entries(y, I, I)
                c2jj = _grids.loo1_cov_entries(y, J, J)
                a11 = ((n1 - 1) * c1ii[:, :, None] + (n2 - 1) * c2ii[:, None, :]) / (N - 2)
                a12 = ((n1 - 1) * c1[:, :, None] + (n2 - 1) * c2[:, None, :]) / (N - 2)
                a22 = ((n1 - 1) * c1jj[:, :, None] + (n2 - 1) * c2jj[:, None, :]) / (N - 2)
                b11, b12, b22 = _grids.invert_block_grids(
                    a11, a12, a22, pairs=pair_labels, eps_rel=eps_rel
                )
                Qc += _quad_grid(b11, b12, b22, x[:, I].T, x[:, J].T, y[:, I].T, y[:, J].T)
            else:
                v = ((n1 - 1) * c1[:, :, None] + (n2 - 1) * c2[:, None, :]) / (N - 2)
                inv = _grids.invert_scalar_grids(v, singles=I)
                Qc += np.einsum("kst,ks,kt->st", inv, x[:, I].T, y[:, I].T, optimize=True)

    pairs = np.asarray(sets.pairs, dtype=int).reshape(-1, 2)
    for lo, hi in _grids.chunked(len(pairs)):
        accumulate(pairs[lo:hi, 0], pairs[lo:hi, 1], True, pairs[lo:hi])
    singles = np.asarray(sets.singles, dtype=int)
    for lo, hi in _grids.chunked(len(singles)):
        accumulate(singles[lo:hi], singles[lo:hi], False, singles[lo:hi])

    return Qx, Qy, Qc, q1x, q1y


def statistic_t2(x, y, sets: ScreeningSets, eps_rel: float = EPS_REL_DEFAULT,
                 alt_pool_weights: bool = False) -> float:
    """Three-term leave-out U-statistic on raw (uncentered) observations."""
    x, y = _validate_groups(x, y, min_rows=5)
    n1 = x.shape[0]
    n2 = y.shape[0]
    Qx, Qy, Qc, _, _ = _two_sample_grids(
        x, y, sets, eps_rel, want_stat=True, want_trace=False,
        alt_pool_weights=alt_pool_weights,
    )
    return float(Qx.sum() / (n1 * (n1 - 1)) + Qy.sum() / (n2 * (n2 - 1))
                 - 2.0 * Qc.sum() / (n1 * n2))


def trace_hat_two(x, y, sets: ScreeningSets, eps_rel: float = EPS_REL_DEFAULT,
                  alt_pool_weights: bool = False) -> float:
    """Average of the two within-group trace U-statistics (pooled blocks,
    leave-two-out group means)."""
    x, y = _validate_groups(x, y, min_rows=5)
    n1 = x.shape[0]
    n2 = y.shape[0]
    _, _, _, q1x, q1y = _two_sample_grids(
        x, y, sets, eps_rel, want_stat=False, want_trace=True,
        alt_pool_weights=alt_pool_weights,
    )
    tr = float((q1x * q1x.T).sum() / (2 * n1 * (n1 - 1))
               + (q1y * q1y.T).sum() / (2 * n2 * (n2 - 1)))
    if tr <= 0.0:
        raise DegenerateVarianceError(
            f"non-positive variance-scale estimate ({tr:.3e}); samples too small to calibrate"
        )
    return tr


def t2_and_trace(x, y, sets: ScreeningSets, eps_rel: float = EPS_REL_DEFAULT,
                 alt_pool_weights: bool = False):
    """Statistic and trace estimate sharing one pass over the screened blocks."""
    x, y = _validate_groups(x, y, min_rows=5)
    n1 = x.shape[0]
    n2 = y.shape[0]
    Qx, Qy, Qc, q1x, q1y = _two_sample_grids(
        x, y, sets, eps_rel, want_stat=True, want_trace=True,
        alt_pool_weights=alt_pool_weights,
    )
    t2 = float(Qx.sum() / (n1 * (n1 - 1)) + Qy.sum() / (n2 * (n2 - 1))
               - 2.0 * Qc.sum() / (n1 * n2))
    tr = float((q1x * q1x.T).sum() / (2 * n1 * (n1 - 1))
               + (q1y * q1y.T).sum() / (2 * n2 * (n2 - 1)))
    if tr <= 0.0:
        raise DegenerateVarianceError(
            f"non-positive variance-scale estimate ({tr:.3e}); samples too small to calibrate"
        )
    return t2, tr


def test_two_sample(x, y, tau0="auto", alpha: float = 0.05, *,
                    select_cfg=None, eps_rel: float = EPS_REL_DEFAULT) -> TestOutcome:
    """One-sided upper-tail two-sample test of equal mean vectors."""
    x, y = _validate_groups(x, y, min_rows=5)
    n1 = x.shape[0]
    n2 = y.shape[0]
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must be in (0, 1), got {alpha}")
    if tau0 == "auto":
        from .tau_select import TauSelectConfig, select_tau0

        cfg = select_cfg if select_cfg is not None else TauSelectConfig()
        tau0 = select_tau0(x, y=y, cfg=cfg)
    tau0 = float(tau0)
    sets = screen_two_sample(kendall_tau_matrix(x), kendall_tau_matrix(y), n1, n2, tau0)
    t2, tr = t2_and_trace(x, y, sets, eps_rel)
    z = t2 / np.sqrt(phi_factor(n1, n2) * tr)
    p_value = float(norm.sf(z))
    return TestOutcome(
        statistic=t2, trace_hat=tr, z=float(z), p_value=p_value, tau0_used=tau0,
        n_pairs=sets.n_pairs, n_singles=sets.n_singles, alpha=alpha,
        reject=bool(z > norm.isf(alpha)),
    )


def power_two(delta, sigma, sets: ScreeningSets, n1: int, n2: int, alpha: float) -> float:
    """Closed-form asymptotic power at mean difference ``delta``."""
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must be in (0, 1), got {alpha}")
    delta = np.asarray(delta, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    P = population_projector(sigma, sets)
    num = float(delta @ P @ delta)
    tr = trace_lambda_sq(sigma, sets)
    snr = num / np.sqrt(phi_factor(n1, n2) * tr)
    return float(norm.cdf(-norm.isf(alpha) + snr))
