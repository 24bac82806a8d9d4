"""One Gibbs cycle for the joint model with Bernoulli (MIRT) node attributes.

A second layer of Polya-Gamma augmentation linearizes the attribute
likelihood; the network-side steps are identical to the Gaussian sampler.
Missing cells can be re-imputed as unknowns at the start of each cycle.
"""

import numpy as np
from scipy.special import expit

from .distributions import sample_mvn_from_canonical, sample_polya_gamma_batch
from .gibbs_gaussian import (
    SamplerRngs,
    _update_z,
    update_alpha,
    update_augmentation_network,
    update_shrinkage,
)
from .model import Family, natural_params_attributes


def update_augmentation_attributes(state, dataset, rng, y=None, mask=None, blocks=1):
    """Draw d^Y_{ij} ~ PG(1, Theta^Y_{ij}); unobserved cells get weight zero."""
    mask = dataset.missing_mask if mask is None else mask
    theta_y = natural_params_attributes(state.gamma, state.Z, state.B)
    if theta_y.size == 0:
        state.aug_Y = np.zeros(theta_y.shape)
        return state.aug_Y
    d = sample_polya_gamma_batch(theta_y[mask], rng, blocks=blocks)
    aug = np.zeros(theta_y.shape)
    aug[mask] = d
    state.aug_Y = aug
    return state.aug_Y


def _attr_terms_bernoulli(state, y, mask):
    # PG weights and centered responses; masking zeroes both, which drops
    # the cell from every downstream sum
    w = state.aug_Y * mask
    kappa_y = np.where(mask, y - 0.5, 0.0)
    r = kappa_y - w * state.gamma[None, :]
    return w, r, kappa_y


def update_latent_positions_bernoulli(state, dataset, prior, rng, y=None, mask=None):
    y = dataset.attributes if y is None else y
    mask = dataset.missing_mask if mask is None else mask
    w, r, _ = _attr_terms_bernoulli(state, y, mask)
    return _update_z(state, dataset, prior, rng, w, r)


def update_gamma_bernoulli(state, dataset, prior, rng, y=None, mask=None):
    """Conjugate normal update of the intercepts under PG augmentation."""
    y = dataset.attributes if y is None else y
    mask = dataset.missing_mask if mask is None else mask
    w = state.aug_Y * mask
    kappa_y = np.where(mask, y - 0.5, 0.0)
    var = 1.0 / (w.sum(axis=0) + prior.sigma_gamma**-2)
    zb = state.Z @ state.B.T
    mean = var * np.sum(kappa_y - w * zb, axis=0)
    state.gamma = mean + np.sqrt(var) * rng.gen.standard_normal(dataset.q)
    return state.gamma


def update_loadings_bernoulli(state, dataset, prior, rng, y=None, mask=None):
    y = dataset.attributes if y is None else y
    mask = dataset.missing_mask if mask is None else mask
    k = state.k
    prior_prec = prior.sigma_B**-2 * np.eye(k)
    Z = state.Z
    w = state.aug_Y * mask
    kappa_y = np.where(mask, y - 0.5, 0.0)
    for j in range(dataset.q):
        wz = w[:, j, None] * Z
        prec = prior_prec + Z.T @ wz
        b = Z.T @ (kappa_y[:, j] - w[:, j] * state.gamma[j])
        state.B[j] = sample_mvn_from_canonical(b, prec, rng)
    return state.B


def impute_missing_attributes(state, dataset, rng):
    """Fill masked cells with Bernoulli(logit^{-1}(Theta^Y)) draws."""
    y = dataset.attributes.copy()
    miss = ~dataset.missing_mask
    if miss.any():
        theta_y = natural_params_attributes(state.gamma, state.Z, state.B)
        u = rng.gen.random(y.shape)
        y[miss] = (u < expit(theta_y))[miss].astype(float)
    return y


def gibbs_cycle_bernoulli(
    state, dataset, prior, rngs, update_coss=True, impute=False, pg_blocks=1
):
    """One full cycle (augmentation A then Y, parameters, shrinkage)."""
    assert dataset.family is Family.BERNOULLI
    y, mask = dataset.attributes, dataset.missing_mask
    if impute and not mask.all():
        y = impute_missing_attributes(state, dataset, rngs.impute)
        mask = np.ones_like(mask)
        state.imputed_y = y
    update_augmentation_network(state, dataset, rngs.pg_net, blocks=pg_blocks)
    update_augmentation_attributes(state, dataset, rngs.pg_attr, y, mask, blocks=pg_blocks)
    update_alpha(state, dataset, prior, rngs.scans)
    update_latent_positions_bernoulli(state, dataset, prior, rngs.scans, y, mask)
    update_gamma_bernoulli(state, dataset, prior, rngs.params, y, mask)
    update_loadings_bernoulli(state, dataset, prior, rngs.params, y, mask)
    if update_coss:
        update_shrinkage(state, prior, rngs.shrinkage)
    return state
