"""Independent brute-force oracles used to pin expected values.

Everything here recomputes from definitions: covariances from scratch over
retained rows via np.cov, dense projector assembly via numpy.linalg.inv, and
double loops over exclusions.  Nothing imports the downdating grid machinery.
"""

import numpy as np


def kendall_tau_brute(x):
    x = np.asarray(x, dtype=float)
    n, p = x.shape
    r = np.eye(p)
    for i in range(p):
        for j in range(i + 1, p):
            num = 0
            for s in range(n):
                for t in range(s + 1, n):
                    num += np.sign((x[s, i] - x[t, i]) * (x[s, j] - x[t, j]))
            r[i, j] = r[j, i] = num / (n * (n - 1) / 2)
    return r


def dense_projector(S, sets):
    """Dense assembly of the block-sparse projector from a covariance."""
    p = S.shape[0]
    P = np.zeros((p, p))
    for i, j in sets.pairs:
        idx = np.ix_([i, j], [i, j])
        P[idx] += np.linalg.inv(S[idx])
    for i in sets.singles:
        P[i, i] += 1.0 / S[i, i]
    return P


def cov_without(x, drop):
    keep = [k for k in range(x.shape[0]) if k not in drop]
    return np.cov(x[keep], rowvar=False).reshape(x.shape[1], x.shape[1])


def mean_without(x, drop):
    keep = [k for k in range(x.shape[0]) if k not in drop]
    return x[keep].mean(axis=0)


def t1_brute(x, mu0, sets):
    n = x.shape[0]
    total = 0.0
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            P = dense_projector(cov_without(x, (s, t)), sets)
            total += (x[s] - mu0) @ P @ (x[t] - mu0)
    return total / (n * (n - 1))


def trace1_brute(x, sets):
    n = x.shape[0]
    total = 0.0
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            P = dense_projector(cov_without(x, (s, t)), sets)
            m = mean_without(x, (s, t))
            total += ((x[s] - m) @ P @ x[t]) * ((x[t] - m) @ P @ x[s])
    return total / (n * (n - 1))


def _pool1(x, y, s, t):
    n1, n2 = x.shape[0], y.shape[0]
    return ((n1 - 2) * cov_without(x, (s, t)) + n2 * np.cov(y, rowvar=False)) / (n1 + n2 - 2)


def _pool2(x, y, s, t):
    n1, n2 = x.shape[0], y.shape[0]
    return (n1 * np.cov(x, rowvar=False) + (n2 - 2) * cov_without(y, (s, t))) / (n1 + n2 - 2)


def _pool12(x, y, s, t):
    n1, n2 = x.shape[0], y.shape[0]
    return ((n1 - 1) * cov_without(x, (s,)) + (n2 - 1) * cov_without(y, (t,))) / (n1 + n2 - 2)


def t2_brute(x, y, sets):
    n1, n2 = x.shape[0], y.shape[0]
    total = 0.0
    for s in range(n1):
        for t in range(n1):
            if s != t:
                total += x[s] @ dense_projector(_pool1(x, y, s, t), sets) @ x[t] / (n1 * (n1 - 1))
    for s in range(n2):
        for t in range(n2):
            if s != t:
                total += y[s] @ dense_projector(_pool2(x, y, s, t), sets) @ y[t] / (n2 * (n2 - 1))
    for s in range(n1):
        for t in range(n2):
            total -= 2 * (x[s] @ dense_projector(_pool12(x, y, s, t), sets) @ y[t]) / (n1 * n2)
    return total


def trace2_brute(x, y, sets):
    n1, n2 = x.shape[0], y.shape[0]
    total = 0.0
    for s in range(n1):
        for t in range(n1):
            if s == t:
                continue
            P = dense_projector(_pool1(x, y, s, t), sets)
            m = mean_without(x, (s, t))
            total += ((x[s] - m) @ P @ x[t]) * ((x[t] - m) @ P @ x[s]) / (2 * n1 * (n1 - 1))
    for s in range(n2):
        for t in range(n2):
            if s == t:
                continue
            P = dense_projector(_pool2(x, y, s, t), sets)
            m = mean_without(y, (s, t))
            total += ((y[s] - m) @ P @ y[t]) * ((y[t] - m) @ P @ y[s]) / (2 * n2 * (n2 - 1))
    return total


def t2_diagonal_brute(x, y):
    """Diagonal-only (tau0 = 1) two-sample statistic, coded independently:
    every projector block is the reciprocal of a pooled leave-out variance."""
    n1, n2 = x.shape[0], y.shape[0]
    N = n1 + n2
    p = x.shape[1]
    v1 = x.var(axis=0, ddof=1)
    v2 = y.var(axis=0, ddof=1)
    total = 0.0
    for s in range(n1):
        for t in range(n1):
            if s == t:
                continue
            keep = [k for k in range(n1) if k not in (s, t)]
            vst = x[keep].var(axis=0, ddof=1)
            pooled = ((n1 - 2) * vst + n2 * v2) / (N - 2)
            total += np.sum(x[s] * x[t] / pooled) / (n1 * (n1 - 1))
    for s in range(n2):
        for t in range(n2):
            if s == t:
                continue
            keep = [k for k in range(n2) if k not in (s, t)]
            vst = y[keep].var(axis=0, ddof=1)
            pooled = (n1 * v1 + (n2 - 2) * vst) / (N - 2)
            total += np.sum(y[s] * y[t] / pooled) / (n2 * (n2 - 1))
    for s in range(n1):
        for t in range(n2):
            k1 = [k for k in range(n1) if k != s]
            k2 = [k for k in range(n2) if k != t]
            pooled = ((n1 - 1) * x[k1].var(axis=0, ddof=1)
                      + (n2 - 1) * y[k2].var(axis=0, ddof=1)) / (N - 2)
            total -= 2 * np.sum(x[s] * y[t] / pooled) / (n1 * n2)
    return total


def ar_correlated_sample(rng, n, p, rho=0.7):
    """Gaussian sample with AR correlation, for generic fixtures."""
    lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    R = rho ** lag
    return rng.standard_normal((n, p)) @ np.linalg.cholesky(R).T
