"""One Gibbs cycle for the joint model with Gaussian node attributes.

Steps follow the systematic scan order: network augmentation, alpha, Z,
gamma, B, sigma^2, then the shrinkage block (rho, sticks, theta).  The
network-side updates defined here are shared with the Bernoulli sampler.
"""

from dataclasses import dataclass

import numpy as np

from . import coss
from ._kernels import alpha_scan, z_scan
from .distributions import (
    FactorizationError,
    RngStream,
    sample_mvn_from_canonical,
    sample_polya_gamma_batch,
)
from .model import Family, natural_params_attributes, natural_params_network


@dataclass
class SamplerRngs:
    """Private streams for each sampling site of one chain."""

    pg_net: RngStream
    pg_attr: RngStream
    scans: RngStream
    params: RngStream
    shrinkage: RngStream
    adapt: RngStream
    impute: RngStream

    @classmethod
    def from_seed(cls, seed):
        return cls(*(RngStream(seed, i) for i in range(1, 8)))


def _centered_adjacency(dataset):
    # kappa^A = A - 1/2 with zeroed diagonal so self terms vanish in scans
    kappa = dataset.adjacency - 0.5
    np.fill_diagonal(kappa, 0.0)
    return kappa


def update_augmentation_network(state, dataset, rng, blocks=1):
    """Draw d^A_{ii'} ~ PG(1, Theta^A_{ii'}) for all dyads, symmetrized."""
    n = dataset.n
    theta_a = natural_params_network(state.alpha, state.Z)
    iu = np.triu_indices(n, k=1)
    draws = sample_polya_gamma_batch(theta_a[iu], rng, blocks=blocks)
    d = np.zeros((n, n))
    d[iu] = draws
    state.aug_A = d + d.T
    return state.aug_A


def update_alpha(state, dataset, prior, rng):
    """Systematic-scan update of alpha, each site seeing the freshest values."""
    n = dataset.n
    eps = rng.gen.standard_normal(n)
    zzt = state.Z @ state.Z.T
    alpha_scan(
        state.alpha,
        state.aug_A,
        _centered_adjacency(dataset),
        zzt,
        prior.sigma_alpha**-2,
        eps,
    )
    return state.alpha


def _attr_terms_gaussian(state, y, mask):
    # quadratic weights and linear terms of the attribute block in the z update
    w = mask / state.sigma2[None, :]
    r = w * (y - state.gamma[None, :])
    return w, r


def _update_z(state, dataset, prior, rng, w_attr, r_attr):
    n, k = state.Z.shape
    eps = rng.gen.standard_normal((n, k))
    ok = z_scan(
        state.Z,
        state.aug_A,
        _centered_adjacency(dataset),
        state.alpha,
        state.B,
        w_attr,
        r_attr,
        state.shrinkage.theta,
        eps,
    )
    if not ok:
        raise FactorizationError("latent-position conditional precision not PD")
    return state.Z


def update_latent_positions_gaussian(state, dataset, prior, rng, y=None, mask=None):
    y = dataset.attributes if y is None else y
    mask = dataset.missing_mask if mask is None else mask
    w, r = _attr_terms_gaussian(state, y, mask)
    return _update_z(state, dataset, prior, rng, w, r)


def update_gamma_gaussian(state, dataset, prior, rng, y=None, mask=None):
    """Conjugate normal update of the attribute intercepts, columnwise."""
    y = dataset.attributes if y is None else y
    mask = dataset.missing_mask if mask is None else mask
    n_j = mask.sum(axis=0)
    var = (prior.sigma_gamma**2 * state.sigma2) / (
        n_j * prior.sigma_gamma**2 + state.sigma2
    )
    resid = np.where(mask, y - state.Z @ state.B.T, 0.0)
    mean = var / state.sigma2 * resid.sum(axis=0)
    state.gamma = mean + np.sqrt(var) * rng.gen.standard_normal(dataset.q)
    return state.gamma


def update_loadings_gaussian(state, dataset, prior, rng, y=None, mask=None):
    """Ridge-form conjugate update of each loading column beta_j."""
    y = dataset.attributes if y is None else y
    mask = dataset.missing_mask if mask is None else mask
    k = state.k
    prior_prec = prior.sigma_B**-2 * np.eye(k)
    Z = state.Z
    for j in range(dataset.q):
        m = mask[:, j]
        zj = Z[m]
        prec = prior_prec + (zj.T @ zj) / state.sigma2[j]
        b = zj.T @ (y[m, j] - state.gamma[j]) / state.sigma2[j]
        state.B[j] = sample_mvn_from_canonical(b, prec, rng)
    return state.B


def update_noise_variance(state, dataset, prior, rng, y=None, mask=None):
    """Inverse-gamma update of the per-attribute residual variances."""
    y = dataset.attributes if y is None else y
    mask = dataset.missing_mask if mask is None else mask
    n_j = mask.sum(axis=0)
    resid = np.where(mask, y - state.gamma[None, :] - state.Z @ state.B.T, 0.0)
    shape = prior.a_sigma + 0.5 * n_j
    rate = prior.b_sigma + 0.5 * (resid**2).sum(axis=0)
    state.sigma2 = rate / rng.gen.standard_gamma(shape)
    return state.sigma2


def update_shrinkage(state, prior, rng):
    """Steps 7-10: indicators, sticks (with refreshed weights), variances."""
    sh = state.shrinkage
    k = sh.k
    for h in range(1, k + 1):
        sh.rho[h - 1] = coss.sample_rho(h, sh.omega, state.Z[:, h - 1], prior, rng)
    sh.v, sh.omega, sh.pi = coss.sample_sticks(sh.rho, prior, rng)
    for h in range(1, k + 1):
        sh.theta[h - 1] = coss.sample_theta(
            h, sh.rho[h - 1], state.Z[:, h - 1], prior, rng
        )
    return sh


def impute_missing_attributes_gaussian(state, dataset, rng):
    """Fill masked Gaussian cells from N(Theta^Y, sigma_j^2)."""
    y = dataset.attributes.copy()
    miss = ~dataset.missing_mask
    if miss.any():
        theta_y = natural_params_attributes(state.gamma, state.Z, state.B)
        noise = rng.gen.standard_normal(dataset.attributes.shape)
        y[miss] = (theta_y + np.sqrt(state.sigma2)[None, :] * noise)[miss]
    return y


def gibbs_cycle_gaussian(
    state, dataset, prior, rngs, update_coss=True, impute=False, pg_blocks=1
):
    """One full cycle; leaves the truncation level unchanged."""
    assert dataset.family is Family.GAUSSIAN
    y, mask = dataset.attributes, dataset.missing_mask
    if impute and not mask.all():
        y = impute_missing_attributes_gaussian(state, dataset, rngs.impute)
        mask = np.ones_like(mask)
        state.imputed_y = y
    update_augmentation_network(state, dataset, rngs.pg_net, blocks=pg_blocks)
    update_alpha(state, dataset, prior, rngs.scans)
    update_latent_positions_gaussian(state, dataset, prior, rngs.scans, y, mask)
    update_gamma_gaussian(state, dataset, prior, rngs.params, y, mask)
    update_loadings_gaussian(state, dataset, prior, rngs.params, y, mask)
    update_noise_variance(state, dataset, prior, rngs.params, y, mask)
    if update_coss:
        update_shrinkage(state, prior, rngs.shrinkage)
    return state
