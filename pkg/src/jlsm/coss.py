"""Cumulative ordered spike-and-slab machinery for the latent-column variances.

Column h of Z carries a variance theta_h that is either the spike value
theta0 or an inverse-gamma slab draw.  The spike probabilities are prefix
sums of non-homogeneous stick-breaking weights, so later columns are
stochastically more shrunk.  The indicator rho_h in {1..k} encodes the
assignment: rho_h <= h means spike.
"""

from dataclasses import dataclass

import numpy as np

from .distributions import (
    ParameterDomainError,
    log_density_slab_multivariate_t,
    log_density_spike_normal,
    sample_beta,
    sample_inverse_gamma,
)


@dataclass
class ShrinkageState:
    v: np.ndarray  # stick-breaking fractions, v[k-1] == 1
    omega: np.ndarray  # simplex weights
    pi: np.ndarray  # cumulative spike probabilities
    rho: np.ndarray  # indicators in {1..k}
    theta: np.ndarray  # per-column variances

    @property
    def k(self):
        return self.v.size

    def copy(self):
        return ShrinkageState(
            self.v.copy(), self.omega.copy(), self.pi.copy(),
            self.rho.copy(), self.theta.copy(),
        )


def stick_breaking_weights(v):
    """omega_l = v_l * prod_{m<l} (1 - v_m)."""
    v = np.asarray(v, dtype=np.float64)
    if np.any(v < 0.0) or np.any(v > 1.0):
        raise ParameterDomainError("stick fractions must lie in [0, 1]")
    if v[-1] != 1.0:
        raise ParameterDomainError("last stick fraction must equal 1")
    remaining = np.concatenate(([1.0], np.cumprod(1.0 - v[:-1])))
    return v * remaining


def cumulative_spike_probs(omega):
    """Prefix sums of omega; the final entry is forced to exactly 1."""
    pi = np.cumsum(np.asarray(omega, dtype=np.float64))
    pi[-1] = 1.0
    return pi


def _rho_log_weights(h, omega, z_col, prior):
    k = omega.size
    with np.errstate(divide="ignore"):
        logw = np.log(omega)
    spike = log_density_spike_normal(z_col, prior.theta0)
    slab = log_density_slab_multivariate_t(z_col, prior.a_theta, prior.b_theta)
    logw = logw + np.where(np.arange(1, k + 1) <= h, spike, slab)
    return logw


def sample_rho(h, omega, z_col, prior, rng):
    """Categorical draw of the indicator for column h (1-based), in log space."""
    logw = _rho_log_weights(h, omega, z_col, prior)
    m = np.max(logw)
    if not np.isfinite(m):
        raise ParameterDomainError("all indicator weights vanished")
    w = np.exp(logw - m)
    cdf = np.cumsum(w)
    u = rng.gen.random() * cdf[-1]
    return int(min(np.searchsorted(cdf, u), cdf.size - 1) + 1)


def sample_theta(h, rho_h, z_col, prior, rng):
    """Spike value if rho_h <= h, else the conditional inverse-gamma slab draw."""
    if rho_h <= h:
        return prior.theta0
    z_col = np.asarray(z_col, dtype=np.float64)
    return sample_inverse_gamma(
        prior.a_theta + 0.5 * z_col.size,
        prior.b_theta + 0.5 * np.dot(z_col, z_col),
        rng,
    )


def sample_sticks(rho, prior, rng):
    """Conditional stick update; returns refreshed (v, omega, pi)."""
    rho = np.asarray(rho)
    k = rho.size
    v = np.empty(k)
    for h in range(1, k):
        a0 = prior.kappa if h == 1 else prior.a_stick
        hits = int(np.sum(rho == h))
        above = int(np.sum(rho > h))
        v[h - 1] = sample_beta(a0 + hits, 1.0 + above, rng)
    v[k - 1] = 1.0
    omega = stick_breaking_weights(v)
    pi = cumulative_spike_probs(omega)
    return v, omega, pi


def active_dimension(rho):
    """K* = number of columns assigned to the slab (rho_h > h)."""
    rho = np.asarray(rho)
    return int(np.sum(rho > np.arange(1, rho.size + 1)))


def sample_prior_shrinkage(prior, k, rng):
    """One forward draw of the shrinkage block (v, omega, pi, rho, theta)."""
    v = np.empty(k)
    for h in range(1, k):
        v[h - 1] = sample_beta(prior.kappa if h == 1 else prior.a_stick, 1.0, rng)
    v[k - 1] = 1.0
    omega = stick_breaking_weights(v)
    pi = cumulative_spike_probs(omega)
    cdf = np.cumsum(omega)
    rho = np.array([
        int(min(np.searchsorted(cdf, rng.gen.random()), k - 1) + 1) for _ in range(k)
    ])
    theta = np.array([
        prior.theta0 if rho[h - 1] <= h
        else sample_inverse_gamma(prior.a_theta, prior.b_theta, rng)
        for h in range(1, k + 1)
    ])
    return ShrinkageState(v, omega, pi, rho, theta)


def prior_predictive_theta(prior, count, rng, k=None):
    """Forward-simulate (pi, theta) sequences from the prior, ``count`` times."""
    if count < 1:
        raise ValueError("count must be >= 1")
    k = prior.k_init if k is None else k
    pis = np.empty((count, k))
    thetas = np.empty((count, k))
    for s in range(count):
        st = sample_prior_shrinkage(prior, k, rng)
        pis[s] = st.pi
        thetas[s] = st.theta
    return pis, thetas
