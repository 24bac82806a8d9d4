"""Independent reference computations used by the tests.

These are deliberately written with different math than the library code:
series expansions, quadrature, and naive loops.
"""

from math import lgamma

import numpy as np
from scipy import integrate


def pg_moments_series(c, terms=200000):
    """Mean and variance of PG(1, c) from its infinite-sum representation.

    PG(1, c) equals (1 / (2 pi^2)) * sum_k g_k / ((k - 1/2)^2 + c^2/(4 pi^2))
    with g_k iid Exp(1), so the moments are convergent scalar series.  An
    integral tail correction is added to the mean series.
    """
    a = c * c / (4.0 * np.pi**2)
    k = np.arange(1, terms + 1)
    d = (k - 0.5) ** 2 + a
    mean = np.sum(1.0 / d) / (2.0 * np.pi**2)
    # tail: sum_{k>K} 1/((k-1/2)^2 + a) ~ integral from K to infinity
    if a > 0:
        tail = (np.pi / 2.0 - np.arctan((terms + 0.0) / np.sqrt(a))) / np.sqrt(a)
    else:
        tail = 1.0 / terms
    mean += tail / (2.0 * np.pi**2)
    var = np.sum(1.0 / d**2) / (4.0 * np.pi**4)
    return mean, var


def slab_logpdf_quadrature(x, a_theta, b_theta):
    """log p(x) for x | theta ~ N(0, theta I), theta ~ IG(a, b), by quadrature."""
    x = np.asarray(x, dtype=float)
    n = x.size
    ss = float(np.dot(x, x))

    def integrand(theta):
        log_normal = -0.5 * n * np.log(2.0 * np.pi * theta) - 0.5 * ss / theta
        log_ig = (
            a_theta * np.log(b_theta)
            - lgamma(a_theta)
            - (a_theta + 1.0) * np.log(theta)
            - b_theta / theta
        )
        return np.exp(log_normal + log_ig)

    val, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=400)
    return np.log(val)


def naive_joint_loglik(dataset, alpha, gamma, Z, B, sigma2):
    """Loop-based joint log-likelihood oracle."""
    from math import log, pi, exp, log1p

    n, q = dataset.n, dataset.q
    ll = 0.0
    for i in range(n):
        for ip in range(i):
            th = alpha[i] + alpha[ip] + float(np.dot(Z[i], Z[ip]))
            ll += dataset.adjacency[i, ip] * th - log1p(exp(-abs(th))) - max(th, 0.0)
    for i in range(n):
        for j in range(q):
            if not dataset.missing_mask[i, j]:
                continue
            th = gamma[j] + float(np.dot(B[j], Z[i]))
            y = dataset.attributes[i, j]
            if dataset.family.value == "gaussian":
                ll += -0.5 * log(2 * pi * sigma2[j]) - 0.5 * (y - th) ** 2 / sigma2[j]
            else:
                ll += y * th - (log1p(exp(-abs(th))) + max(th, 0.0))
    return ll


def expected_one_minus_pi(kappa, a, h):
    """Closed form E(1 - pi_h) = (1/(kappa+1)) * (1/(a+1))^(h-1)."""
    return (1.0 / (kappa + 1.0)) * (1.0 / (a + 1.0)) ** (h - 1)


def geweke_zscores(forward, successive, batch=100):
    """z-scores comparing means of two functional sample matrices.

    ``forward`` rows are iid; ``successive`` rows are autocorrelated, so its
    standard error uses nonoverlapping batch means.
    """
    forward = np.asarray(forward, dtype=float)
    successive = np.asarray(successive, dtype=float)
    mf = forward.mean(axis=0)
    vf = forward.var(axis=0, ddof=1) / forward.shape[0]
    nb = successive.shape[0] // batch
    bm = successive[: nb * batch].reshape(nb, batch, -1).mean(axis=1)
    ms = successive.mean(axis=0)
    vs = bm.var(axis=0, ddof=1) / nb
    return (mf - ms) / np.sqrt(vf + vs)
