"""Synthetic data generation for the simulation studies."""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .model import Dataset, Family, natural_params_attributes, natural_params_network


@dataclass
class SimDesign:
    n: int
    q: int
    k0: int
    family: Family = Family.GAUSSIAN
    alpha_range: tuple = (-0.5, 0.5)
    loading_range: tuple = (0.25, 1.25)
    noise_sd: float = 1.0
    seed: int = 0

    def __post_init__(self):
        self.family = Family(self.family)
        if self.k0 < 1:
            raise ValueError("k0 must be >= 1")
        if self.noise_sd <= 0:
            raise ValueError("noise_sd must be positive")


@dataclass
class GroundTruth:
    alpha0: np.ndarray
    gamma0: np.ndarray
    Z0: np.ndarray
    B0: np.ndarray
    density: float


def simple_structure_loadings(q, k0, loading_range, rng):
    """Each row loads on exactly one column, assigned round-robin."""
    B = np.zeros((q, k0))
    lo, hi = loading_range
    values = rng.gen.uniform(lo, hi, size=q)
    for j in range(q):
        B[j, j % k0] = values[j]
    return B


def network_density(adjacency):
    """Fraction of present dyads, 2 * edges / (n * (n - 1))."""
    a = np.asarray(adjacency)
    n = a.shape[0]
    return float(np.triu(a, k=1).sum() * 2.0 / (n * (n - 1)))


def generate_dataset(design, rng):
    """Draw (Dataset, GroundTruth) from the generative model."""
    n, q, k0 = design.n, design.q, design.k0
    alpha = rng.gen.uniform(*design.alpha_range, size=n)
    gamma = rng.gen.standard_normal(q)
    Z = rng.gen.standard_normal((n, k0))
    B = simple_structure_loadings(q, k0, design.loading_range, rng)

    theta_a = natural_params_network(alpha, Z)
    iu = np.triu_indices(n, k=1)
    edges = (rng.gen.random(iu[0].size) < expit(theta_a[iu])).astype(np.int8)
    A = np.zeros((n, n), dtype=np.int8)
    A[iu] = edges
    A = A + A.T

    theta_y = natural_params_attributes(gamma, Z, B)
    if design.family is Family.GAUSSIAN:
        Y = theta_y + design.noise_sd * rng.gen.standard_normal((n, q))
    else:
        Y = (rng.gen.random((n, q)) < expit(theta_y)).astype(float)

    dataset = Dataset(A, Y, design.family)
    truth = GroundTruth(alpha, gamma, Z, B, network_density(A))
    return dataset, truth
