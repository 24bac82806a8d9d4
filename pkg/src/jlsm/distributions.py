"""Random variate generation and log densities used by the Gibbs samplers.

All samplers draw from an :class:`RngStream`, a thin wrapper around a
counter-based (Philox) generator keyed by ``(seed, stream_id)``.  Replaying a
stream with the same key reproduces the draw sequence bit for bit, and
distinct stream ids are statistically independent, so concurrent sampling
sites can each own a private stream.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.special import gammaln

from ._pg import pg_draw, pg_gamma_series


class ParameterDomainError(ValueError):
    """A distribution parameter is outside its admissible domain."""


class FactorizationError(RuntimeError):
    """A covariance/precision matrix failed factorization after jitter retries."""


@dataclass
class RngStream:
    """Counter-based random stream identified by (seed, stream_id)."""

    seed: int
    stream_id: int = 0
    gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.gen = np.random.Generator(np.random.Philox(ss))

    def split(self, stream_id):
        """Fresh independent stream with the same seed and a new id."""
        return RngStream(self.seed, stream_id)

    def child_seed(self):
        """One 64-bit seed for handing to an external (compiled) kernel."""
        return int(self.gen.integers(0, 2**63))


def sample_polya_gamma(c, rng):
    """One exact PG(1, c) draw; the law depends on c only through |c|."""
    if not np.isfinite(c):
        raise ParameterDomainError(f"PG tilt must be finite, got {c}")
    return float(pg_draw(np.array([c]), rng.child_seed())[0])


def sample_polya_gamma_batch(c, rng, blocks=1):
    """Exact PG(1, c_i) draws for an array ``c``.

    ``blocks > 1`` splits the array into equal contiguous blocks, each drawn
    from its own derived seed.  Block draws are independent, so they may be
    dispatched to worker threads; the result is identical either way.
    """
    c = np.asarray(c, dtype=np.float64)
    if not np.all(np.isfinite(c)):
        raise ParameterDomainError("PG tilts must be finite")
    if blocks <= 1 or c.size <= 1:
        return pg_draw(c, rng.child_seed())
    flat = c.ravel()
    seeds = [rng.child_seed() for _ in range(blocks)]
    parts = np.array_split(np.arange(flat.size), blocks)
    out = np.empty_like(flat)
    for idx, seed in zip(parts, seeds):
        out[idx] = pg_draw(flat[idx], seed)
    return out.reshape(c.shape)


def sample_polya_gamma_approx(c, rng, terms=200):
    """Truncated sum-of-gammas PG(1, c) fallback (validation only)."""
    return pg_gamma_series(c, rng.gen, terms=terms)


def sample_inverse_gamma(shape, rate, rng):
    """Draw X with density proportional to x^(-shape-1) exp(-rate/x)."""
    if shape <= 0 or rate <= 0:
        raise ParameterDomainError(
            f"inverse gamma needs shape, rate > 0, got ({shape}, {rate})"
        )
    return rate / rng.gen.standard_gamma(shape)


def sample_beta(a, b, rng):
    if a <= 0 or b <= 0:
        raise ParameterDomainError(f"beta needs a, b > 0, got ({a}, {b})")
    return rng.gen.beta(a, b)


def _chol_with_jitter(mat):
    """Lower Cholesky factor, retrying with escalating jitter on failure."""
    dim = mat.shape[0]
    try:
        return linalg.cholesky(mat, lower=True)
    except linalg.LinAlgError:
        pass
    jitter = 1e-10 * np.trace(mat) / dim
    for _ in range(3):
        try:
            return linalg.cholesky(mat + jitter * np.eye(dim), lower=True)
        except linalg.LinAlgError:
            jitter *= 10.0
    raise FactorizationError("matrix not positive definite after jitter retries")


def sample_mvn(mean, covariance=None, precision=None, rng=None):
    """Multivariate normal draw from either covariance or precision form."""
    mean = np.asarray(mean, dtype=np.float64)
    if mean.size == 0:
        return np.empty(0)
    if (covariance is None) == (precision is None):
        raise ValueError("supply exactly one of covariance or precision")
    eps = rng.gen.standard_normal(mean.size)
    if covariance is not None:
        low = _chol_with_jitter(np.asarray(covariance, dtype=np.float64))
        return mean + low @ eps
    low = _chol_with_jitter(np.asarray(precision, dtype=np.float64))
    # precision = L L^T, so L^{-T} eps has the target covariance
    return mean + linalg.solve_triangular(low, eps, lower=True, trans="T")


def sample_mvn_from_canonical(b, precision, rng):
    """Draw from N(precision^{-1} b, precision^{-1}) without forming the inverse."""
    b = np.asarray(b, dtype=np.float64)
    if b.size == 0:
        return np.empty(0)
    low = _chol_with_jitter(np.asarray(precision, dtype=np.float64))
    mu = linalg.cho_solve((low, True), b)
    eps = rng.gen.standard_normal(b.size)
    return mu + linalg.solve_triangular(low, eps, lower=True, trans="T")


def log_density_spike_normal(x, theta0):
    """Sum of log N(x_i; 0, theta0) over the entries of x."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    return -0.5 * n * math.log(2.0 * math.pi * theta0) - 0.5 * np.dot(x, x) / theta0


def log_density_slab_multivariate_t(x, a_theta, b_theta):
    """Log density of the IG-mixed slab marginal of a latent column.

    Equals the n-dimensional Student-t with 2*a_theta degrees of freedom and
    scale matrix (b_theta/a_theta) I, i.e. the marginal of x_i ~iid N(0, theta)
    with one shared theta ~ IG(a_theta, b_theta) integrated out.
    """
    if a_theta <= 0 or b_theta <= 0:
        raise ParameterDomainError("slab needs a_theta, b_theta > 0")
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    ss = np.dot(x, x)
    return (
        a_theta * math.log(b_theta)
        + gammaln(a_theta + 0.5 * n)
        - gammaln(a_theta)
        - 0.5 * n * math.log(2.0 * math.pi)
        - (a_theta + 0.5 * n) * math.log(b_theta + 0.5 * ss)
    )
