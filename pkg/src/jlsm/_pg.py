"""Exact Polya-Gamma PG(1, c) sampling via the Devroye rejection scheme.

The sampler targets the Jacobi-type density of J*(1, z) with z = |c|/2 and
returns J*/4.  Proposals are split at the standard truncation point t = 0.64
between an inverse-Gaussian piece on (0, t] and an exponential tail on
(t, inf); the alternating partial sums of the series coefficients decide
acceptance, so every accepted draw is exact.

Kernels are numba-compiled and consume numba's global RNG, which is reseeded
from the caller-provided seed on every batch call.  A truncated sum-of-gammas
approximation is kept as a validation fallback only.
"""

import math

import numpy as np
from numba import njit

_TRUNC = 0.64


@njit(cache=True)
def _norm_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@njit(cache=True)
def _series_coef(n, x):
    # n-th coefficient a_n(x) of the alternating series for the J*(1) density;
    # the two representations converge fastest on opposite sides of _TRUNC.
    d = math.pi * (n + 0.5)
    if x > _TRUNC:
        return d * math.exp(-0.5 * d * d * x)
    return d * (2.0 / (math.pi * x)) ** 1.5 * math.exp(-2.0 * (n + 0.5) ** 2 / x)


@njit(cache=True)
def _mass_right(z):
    # Probability that the proposal falls in the exponential tail (x > t).
    fz = 0.125 * math.pi * math.pi + 0.5 * z * z
    t = _TRUNC
    b = math.sqrt(1.0 / t) * (t * z - 1.0)
    a = -math.sqrt(1.0 / t) * (t * z + 1.0)
    x0 = math.log(fz) + fz * t
    xb = x0 - z + math.log(_norm_cdf(b))
    xa = x0 + z + math.log(_norm_cdf(a))
    qdivp = 4.0 / math.pi * (math.exp(xb) + math.exp(xa))
    return 1.0 / (1.0 + qdivp)


@njit(cache=True)
def _rtigauss(z):
    # Inverse-Gaussian(mu=1/z, lambda=1) truncated to (0, _TRUNC].
    t = _TRUNC
    x = t + 1.0
    if z < 1.0 / t:
        # Sparse-information regime: rejection from the scaled reciprocal
        # chi-square proposal.
        alpha = 0.0
        while np.random.random() > alpha:
            e1 = np.random.exponential(1.0)
            e2 = np.random.exponential(1.0)
            while e1 * e1 > 2.0 * e2 / t:
                e1 = np.random.exponential(1.0)
                e2 = np.random.exponential(1.0)
            x = t / ((1.0 + t * e1) ** 2)
            alpha = math.exp(-0.5 * z * z * x)
    else:
        mu = 1.0 / z
        while x > t:
            y = np.random.standard_normal() ** 2
            muy = mu * y
            x = mu + 0.5 * mu * muy - 0.5 * mu * math.sqrt(4.0 * muy + muy * muy)
            if np.random.random() > mu / (mu + x):
                x = mu * mu / x
    return x


@njit(cache=True)
def _pg_one(c):
    z = 0.5 * abs(c)
    fz = 0.125 * math.pi * math.pi + 0.5 * z * z
    p_right = _mass_right(z)
    while True:
        if np.random.random() < p_right:
            x = _TRUNC + np.random.exponential(1.0) / fz
        else:
            x = _rtigauss(z)
        s = _series_coef(0, x)
        y = np.random.random() * s
        n = 0
        while True:
            n += 1
            if n % 2 == 1:
                s -= _series_coef(n, x)
                if y <= s:
                    return 0.25 * x
            else:
                s += _series_coef(n, x)
                if y > s:
                    break


@njit(cache=True)
def _pg_batch(c, seed):
    np.random.seed(seed)
    out = np.empty(c.size)
    for i in range(c.size):
        out[i] = _pg_one(c[i])
    return out


def pg_draw(c, seed):
    """Exact PG(1, c) draws for a flat array ``c``, seeded deterministically."""
    c = np.ascontiguousarray(c, dtype=np.float64)
    return _pg_batch(c.ravel(), np.uint64(seed)).reshape(c.shape)


def pg_gamma_series(c, rng, terms=200):
    """Truncated sum-of-gammas approximation to PG(1, c).

    Validation fallback only; the Devroye sampler is the default everywhere.
    Mean-corrected so the truncation bias vanishes in expectation.
    """
    c = np.asarray(c, dtype=np.float64)
    ks = (np.arange(terms) + 0.5) ** 2
    g = rng.standard_gamma(1.0, size=c.shape + (terms,))
    denom = ks + c[..., None] ** 2 / (4.0 * math.pi**2)
    x = np.sum(g / denom, axis=-1) / (2.0 * math.pi**2)
    half = np.maximum(np.abs(c) / 2.0, 1e-12)
    mean_full = np.tanh(half) / (4.0 * half)
    mean_trunc = np.sum(1.0 / denom, axis=-1) / (2.0 * math.pi**2)
    return x * mean_full / mean_trunc
