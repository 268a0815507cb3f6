"""One-sample pairwise Hotelling test.

Provides the all-pairs diagnostic statistic, the screened leave-two-out
U-statistic, its variance-scale (trace) estimator, the standardized test,
and the closed-form asymptotic power function.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import norm

from . import _grids
from .core import EPS_REL_DEFAULT, Cov2, invert_cov2, kendall_tau_matrix, validate_sample_matrix
from .errors import ConfigError, DataValidationError, DegenerateVarianceError, SingularBlockError
from .outcome import TestOutcome
from .screening import ScreeningSets, screen


def _check_mu0(mu0, p: int) -> np.ndarray:
    mu0 = np.asarray(mu0, dtype=float)
    if mu0.shape != (p,):
        raise DataValidationError(f"mu0 must have shape ({p},), got {mu0.shape}")
    if not np.all(np.isfinite(mu0)):
        raise DataValidationError("mu0 contains NaN or Inf entries")
    return mu0


def statistic_w1(x, mu0, eps_rel: float = EPS_REL_DEFAULT) -> float:
    """All-pairs quadratic form n (xbar - mu0)^T [sum of 2x2 block inverses]
    (xbar - mu0) built from the full-sample covariance."""
    x = validate_sample_matrix(x, min_rows=4)
    n, p = x.shape
    if p < 2:
        raise DataValidationError("the all-pairs statistic needs p >= 2")
    mu0 = _check_mu0(mu0, p)
    S = np.cov(x, rowvar=False)
    u = x.mean(axis=0) - mu0
    d = np.diag(S).copy()
    det = np.outer(d, d) - S * S
    iu, ju = np.triu_indices(p, k=1)
    scale = np.abs(np.outer(d, d))
    bad = det[iu, ju] <= eps_rel * scale[iu, ju]
    if bad.any():
        k = int(np.nonzero(bad)[0][0])
        raise SingularBlockError(
            f"singular full-sample block for pair ({iu[k]}, {ju[k]})",
            pair=(int(iu[k]), int(ju[k])),
        )
    usq = u * u
    num = np.outer(usq, d) + np.outer(d, usq) - 2.0 * S * np.outer(u, u)
    return float(n * (num[iu, ju] / det[iu, ju]).sum())


def _quad_grid(b11, b12, b22, ur, uc, vr, vc):
    """sum_k b_k-weighted bilinear forms: out[s, t] accumulates the 2x2
    quadratic form between row vectors (ur, uc)[.,s] and column vectors
    (vr, vc)[.,t]."""
    out = np.einsum("kst,ks,kt->st", b11, ur, vr, optimize=True)
    out += np.einsum("kst,ks,kt->st", b12, ur, vc, optimize=True)
    out += np.einsum("kst,ks,kt->st", b12, uc, vr, optimize=True)
    out += np.einsum("kst,ks,kt->st", b22, uc, vc, optimize=True)
    return out


def _one_sample_grids(x, mu0, sets: ScreeningSets, eps_rel, want_stat, want_trace):
    """Accumulate the (n, n) exclusion grids for the statistic and the trace
    estimator in one pass over the screened blocks."""
    n, p = x.shape
    u = (x - mu0) if want_stat else None
    Q = np.zeros((n, n)) if want_stat else None
    q1 = np.zeros((n, n)) if want_trace else None

    pairs = np.asarray(sets.pairs, dtype=int).reshape(-1, 2)
    for lo, hi in _grids.chunked(len(pairs)):
        I = pairs[lo:hi, 0]
        J = pairs[lo:hi, 1]
        a11 = _grids.loo2_cov_entries(x, I, I)
        a12 = _grids.loo2_cov_entries(x, I, J)
        a22 = _grids.loo2_cov_entries(x, J, J)
        b11, b12, b22 = _grids.invert_block_grids(
            a11, a12, a22, pairs=pairs[lo:hi], eps_rel=eps_rel, mask_diagonal=True
        )
        if want_stat:
            ui = u[:, I].T
            uj = u[:, J].T
            Q += _quad_grid(b11, b12, b22, ui, uj, ui, uj)
        if want_trace:
            xi = x[:, I].T
            xj = x[:, J].T
            Ui = xi[:, :, None] - _grids.loo2_mean_entries(x, I)
            Uj = xj[:, :, None] - _grids.loo2_mean_entries(x, J)
            q1 += (b11 * Ui * xi[:, None, :] + b12 * (Ui * xj[:, None, :] + Uj * xi[:, None, :])
                   + b22 * Uj * xj[:, None, :]).sum(axis=0)

    singles = np.asarray(sets.singles, dtype=int)
    for lo, hi in _grids.chunked(len(singles)):
        S = singles[lo:hi]
        v = _grids.loo2_cov_entries(x, S, S)
        inv = _grids.invert_scalar_grids(v, singles=S, mask_diagonal=True)
        if want_stat:
            us = u[:, S].T
            Q += np.einsum("kst,ks,kt->st", inv, us, us, optimize=True)
        if want_trace:
            xs = x[:, S].T
            Us = xs[:, :, None] - _grids.loo2_mean_entries(x, S)
            q1 += (inv * Us * xs[:, None, :]).sum(axis=0)
    return Q, q1


def statistic_t1(x, mu0, sets: ScreeningSets, eps_rel: float = EPS_REL_DEFAULT) -> float:
    """Screened leave-two-out U-statistic: the double sum over ordered s != t
    of (X_s - mu0)^T Phat^{(s,t)} (X_t - mu0), normalized by n(n-1)."""
    x = validate_sample_matrix(x, min_rows=5)
    n, p = x.shape
    mu0 = _check_mu0(mu0, p)
    Q, _ = _one_sample_grids(x, mu0, sets, eps_rel, want_stat=True, want_trace=False)
    return float(Q.sum() / (n * (n - 1)))


def trace_hat_one(x, sets: ScreeningSets, eps_rel: float = EPS_REL_DEFAULT) -> float:
    """U-statistic estimator of the squared variance scale.

    Each (s, t) summand is the product of two full quadratic forms; both are
    accumulated across all screened blocks before multiplying.
    """
    x = validate_sample_matrix(x, min_rows=5)
    n = x.shape[0]
    _, q1 = _one_sample_grids(x, None, sets, eps_rel, want_stat=False, want_trace=True)
    # The (t, s) companion form is the transpose of the (s, t) grid.
    tr = float((q1 * q1.T).sum() / (n * (n - 1)))
    if tr <= 0.0:
        raise DegenerateVarianceError(
            f"non-positive variance-scale estimate ({tr:.3e}); sample too small to calibrate"
        )
    return tr


def t1_and_trace(x, mu0, sets: ScreeningSets, eps_rel: float = EPS_REL_DEFAULT):
    """Compute the statistic and its trace estimate sharing one grid pass."""
    x = validate_sample_matrix(x, min_rows=5)
    n, p = x.shape
    mu0 = _check_mu0(mu0, p)
    Q, q1 = _one_sample_grids(x, mu0, sets, eps_rel, want_stat=True, want_trace=True)
    t1 = float(Q.sum() / (n * (n - 1)))
    tr = float((q1 * q1.T).sum() / (n * (n - 1)))
    if tr <= 0.0:
        raise DegenerateVarianceError(
            f"non-positive variance-scale estimate ({tr:.3e}); sample too small to calibrate"
        )
    return t1, tr


def test_one_sample(x, mu0, tau0="auto", alpha: float = 0.05, *,
                    select_cfg=None, eps_rel: float = EPS_REL_DEFAULT) -> TestOutcome:
    """One-sided upper-tail test; rejects when z exceeds the normal quantile.

    ``tau0`` may be a fixed threshold in [0, 1] or ``"auto"`` to run the
    subsample-based threshold selection.
    """
    x = validate_sample_matrix(x, min_rows=5)
    n, p = x.shape
    mu0 = _check_mu0(mu0, p)
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must be in (0, 1), got {alpha}")
    if tau0 == "auto":
        from .tau_select import TauSelectConfig, select_tau0

        cfg = select_cfg if select_cfg is not None else TauSelectConfig()
        tau0 = select_tau0(x, mu0=mu0, cfg=cfg)
    tau0 = float(tau0)
    sets = screen(kendall_tau_matrix(x), tau0)
    t1, tr = t1_and_trace(x, mu0, sets, eps_rel)
    z = t1 / np.sqrt(2.0 * tr / n**2)
    p_value = float(norm.sf(z))
    return TestOutcome(
        statistic=t1, trace_hat=tr, z=float(z), p_value=p_value, tau0_used=tau0,
        n_pairs=sets.n_pairs, n_singles=sets.n_singles, alpha=alpha,
        reject=bool(z > norm.isf(alpha)),
    )


def population_projector(sigma: np.ndarray, sets: ScreeningSets,
                         eps_rel: float = EPS_REL_DEFAULT) -> np.ndarray:
    """Dense population projector built from the covariance's screened blocks.

    Only used on the analytic power path; the test statistics never form it.
    """
    sigma = np.asarray(sigma, dtype=float)
    p = sigma.shape[0]
    P = np.zeros((p, p))
    for i, j in sets.pairs:
        b = invert_cov2(Cov2(sigma[i, i], sigma[i, j], sigma[j, j]),
                        eps_rel=eps_rel, pair=(i, j))
        P[i, i] += b.a11
        P[i, j] += b.a12
        P[j, i] += b.a12
        P[j, j] += b.a22
    for i in sets.singles:
        if sigma[i, i] <= 0.0:
            raise SingularBlockError(f"non-positive population variance at {i}", pair=i)
        P[i, i] += 1.0 / sigma[i, i]
    return P


def trace_lambda_sq(sigma: np.ndarray, sets: ScreeningSets) -> float:
    """Analytic tr((P_O Sigma)^2) for a population covariance and fixed sets."""
    P = population_projector(sigma, sets)
    M = P @ np.asarray(sigma, dtype=float)
    return float(np.einsum("ij,ji->", M, M))


def power_one(delta, sigma, sets: ScreeningSets, n: int, alpha: float) -> float:
    """Closed-form asymptotic power at mean shift ``delta``."""
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must be in (0, 1), got {alpha}")
    delta = np.asarray(delta, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    P = population_projector(sigma, sets)
    num = float(delta @ P @ delta)
    tr = trace_lambda_sq(sigma, sets)
    snr = num / np.sqrt(2.0 * tr / n**2)
    return float(norm.cdf(-norm.isf(alpha) + snr))
