"""Domain types, natural-parameter maps and the joint log-likelihood."""

import enum
from dataclasses import dataclass, field

import numpy as np


class DimensionError(ValueError):
    """Array shapes are inconsistent with each other or with the dataset."""


class Family(str, enum.Enum):
    GAUSSIAN = "gaussian"
    BERNOULLI = "bernoulli"


@dataclass
class Dataset:
    """Symmetric binary network plus an n x q node-attribute matrix.

    ``missing_mask`` is True where an attribute cell is observed.
    """

    adjacency: np.ndarray
    attributes: np.ndarray
    family: Family
    missing_mask: np.ndarray = None

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
            raise DimensionError(f"adjacency must be square with n >= 2, got {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency must have a zero diagonal")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency must be binary")
        self.adjacency = a.astype(np.float64)
        y = np.asarray(self.attributes, dtype=np.float64)
        if y.ndim != 2 or y.shape[0] != a.shape[0]:
            raise DimensionError(
                f"attributes must be n x q with n={a.shape[0]}, got {y.shape}"
            )
        self.attributes = y
        self.family = Family(self.family)
        if self.missing_mask is None:
            self.missing_mask = np.ones(y.shape, dtype=bool)
        else:
            self.missing_mask = np.asarray(self.missing_mask, dtype=bool)
            if self.missing_mask.shape != y.shape:
                raise DimensionError("missing_mask shape must match attributes")
        if self.family is Family.BERNOULLI:
            obs = y[self.missing_mask]
            if not np.isin(obs, (0.0, 1.0)).all():
                raise ValueError("Bernoulli attributes must be binary where observed")

    @property
    def n(self):
        return self.adjacency.shape[0]

    @property
    def q(self):
        return self.attributes.shape[1]


@dataclass
class PriorConfig:
    """Hyperparameters of the priors; defaults follow the simulation settings."""

    sigma_alpha: float = 100.0
    sigma_gamma: float = 100.0
    sigma_B: float = 1.0
    a_sigma: float = 1.0
    b_sigma: float = 1.0
    a_theta: float = 3.0
    b_theta: float = 3.0
    kappa: float = None  # defaults to k_init**2
    a_stick: float = 8.0
    theta0: float = 0.1
    k_init: int = 8

    def __post_init__(self):
        if self.kappa is None:
            self.kappa = float(self.k_init) ** 2
        for name in (
            "sigma_alpha",
            "sigma_gamma",
            "sigma_B",
            "a_sigma",
            "b_sigma",
            "a_theta",
            "b_theta",
            "kappa",
            "a_stick",
            "theta0",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.k_init < 1:
            raise ValueError("k_init must be a positive integer")
        if not self.theta0 < self.b_theta / self.a_theta:
            raise ValueError("theta0 must be below the slab scale b_theta/a_theta")


@dataclass
class ModelState:
    """All sampled quantities for one MCMC iteration."""

    alpha: np.ndarray
    gamma: np.ndarray
    Z: np.ndarray
    B: np.ndarray
    sigma2: np.ndarray  # Gaussian family only
    aug_A: np.ndarray
    aug_Y: np.ndarray  # Bernoulli family only
    shrinkage: "ShrinkageState" = None

    @property
    def k(self):
        return self.Z.shape[1]


def natural_params_network(alpha, Z):
    """Theta^A[i, i'] = alpha_i + alpha_i' + z_i . z_i' (diagonal unused)."""
    alpha = np.asarray(alpha, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    if Z.shape[0] != alpha.size:
        raise DimensionError(f"Z has {Z.shape[0]} rows but alpha has {alpha.size}")
    return alpha[:, None] + alpha[None, :] + Z @ Z.T


def natural_params_attributes(gamma, Z, B):
    """Theta^Y[i, j] = gamma_j + beta_j . z_i."""
    gamma = np.asarray(gamma, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if B.shape != (gamma.size, Z.shape[1]):
        raise DimensionError(
            f"B must be q x k = {(gamma.size, Z.shape[1])}, got {B.shape}"
        )
    return gamma[None, :] + Z @ B.T


def _log1pexp(x):
    # log(1 + exp(x)) without overflow for |x| up to ~1e308
    return np.logaddexp(0.0, x)


def joint_log_likelihood(dataset, state):
    """Log p(A, Y | state); missing attribute cells contribute zero."""
    n, q = dataset.n, dataset.q
    if state.alpha.size != n or state.Z.shape[0] != n:
        raise DimensionError("state dimensions do not match dataset")
    theta_a = natural_params_network(state.alpha, state.Z)
    iu = np.triu_indices(n, k=1)
    a_up = dataset.adjacency[iu]
    th_up = theta_a[iu]
    ll = float(np.sum(a_up * th_up - _log1pexp(th_up)))
    if q == 0:
        return ll
    if state.gamma.size != q or state.B.shape[0] != q:
        raise DimensionError("state attribute dimensions do not match dataset")
    theta_y = natural_params_attributes(state.gamma, state.Z, state.B)
    mask = dataset.missing_mask
    y = dataset.attributes
    if dataset.family is Family.GAUSSIAN:
        resid2 = (y - theta_y) ** 2
        per_cell = -0.5 * (np.log(2.0 * np.pi * state.sigma2)[None, :] + resid2 / state.sigma2[None, :])
        ll += float(np.sum(per_cell[mask]))
    else:
        per_cell = y * theta_y - _log1pexp(theta_y)
        ll += float(np.sum(per_cell[mask]))
    return ll
