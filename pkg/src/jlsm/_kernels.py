"""Compiled inner loops for the sequential Gibbs scans.

The alpha and z updates are systematic scans in which site i conditions on
the freshest values of every other site, so they cannot be vectorized; the
loops are numba-compiled instead.  All randomness is pre-drawn as standard
normals by the caller, keeping the kernels deterministic functions of their
inputs.

Both kernels expect the diagonals of the dyadic weight matrix ``d_a`` and the
centered adjacency ``kappa_a`` (A - 1/2) to be zeroed so self terms drop out
of the sums.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _chol(a):
    # Lower Cholesky with a success flag instead of an exception.
    n = a.shape[0]
    low = np.zeros((n, n))
    for j in range(n):
        s = a[j, j]
        for t in range(j):
            s -= low[j, t] * low[j, t]
        if s <= 0.0:
            return low, False
        low[j, j] = np.sqrt(s)
        for i in range(j + 1, n):
            s = a[i, j]
            for t in range(j):
                s -= low[i, t] * low[j, t]
            low[i, j] = s / low[j, j]
    return low, True


@njit(cache=True)
def _draw_canonical(b, prec, eps):
    """Draw from N(prec^{-1} b, prec^{-1}); retries with escalating jitter.

    Returns (draw, ok).  The jitter policy mirrors the dense-path sampler:
    start at 1e-10 * trace/dim and escalate tenfold up to three times.
    """
    k = b.size
    low, ok = _chol(prec)
    if not ok:
        jitter = 1e-10 * np.trace(prec) / k
        for _ in range(3):
            pj = prec + jitter * np.eye(k)
            low, ok = _chol(pj)
            if ok:
                break
            jitter *= 10.0
        if not ok:
            return np.zeros(k), False
    # forward solve L y = b, back solve L^T mu = y
    y = np.empty(k)
    for i in range(k):
        s = b[i]
        for t in range(i):
            s -= low[i, t] * y[t]
        y[i] = s / low[i, i]
    mu = np.empty(k)
    for i in range(k - 1, -1, -1):
        s = y[i]
        for t in range(i + 1, k):
            s -= low[t, i] * mu[t]
        mu[i] = s / low[i, i]
    # noise with covariance prec^{-1}: solve L^T x = eps
    x = np.empty(k)
    for i in range(k - 1, -1, -1):
        s = eps[i]
        for t in range(i + 1, k):
            s -= low[t, i] * x[t]
        x[i] = s / low[i, i]
    return mu + x, True


@njit(cache=True)
def alpha_scan(alpha, d_a, kappa_a, zzt, prior_prec, eps):
    """Sequential update of the degree-heterogeneity terms, in place."""
    n = alpha.size
    for i in range(n):
        prec = prior_prec
        mean_num = 0.0
        for j in range(n):
            prec += d_a[i, j]
            mean_num += kappa_a[i, j] - d_a[i, j] * (alpha[j] + zzt[i, j])
        var = 1.0 / prec
        alpha[i] = var * mean_num + np.sqrt(var) * eps[i]


@njit(cache=True)
def z_scan(Z, d_a, kappa_a, alpha, B, w_attr, r_attr, theta, eps):
    """Sequential update of the latent positions, in place.

    ``w_attr`` holds the per-cell quadratic weights of the attribute block
    (mask/sigma_j^2 for Gaussian, PG draws for Bernoulli) and ``r_attr`` the
    matching linear terms, so one kernel serves both families.  Returns False
    if any conditional precision failed to factor.
    """
    n, k = Z.shape
    q = w_attr.shape[1]
    for i in range(n):
        prec = np.zeros((k, k))
        b = np.zeros(k)
        for j in range(n):
            d = d_a[i, j]
            c = kappa_a[i, j] - d * (alpha[j] + alpha[i])
            if j == i:
                continue
            for s in range(k):
                zjs = Z[j, s]
                b[s] += c * zjs
                for t in range(s, k):
                    prec[s, t] += d * zjs * Z[j, t]
        for j in range(q):
            w = w_attr[i, j]
            r = r_attr[i, j]
            for s in range(k):
                bjs = B[j, s]
                b[s] += r * bjs
                for t in range(s, k):
                    prec[s, t] += w * bjs * B[j, t]
        for s in range(k):
            prec[s, s] += 1.0 / theta[s]
            for t in range(s + 1, k):
                prec[t, s] = prec[s, t]
        draw, ok = _draw_canonical(b, prec, eps[i])
        if not ok:
            return False
        Z[i, :] = draw
    return True
