"""Dynamic truncation of the latent dimension between Gibbs cycles.

After burn-in, an adaptation coin with diminishing probability
exp(eta0 + eta1 * t) decides whether to resize.  Contraction keeps the
active columns (rho_h > h) plus the lowest-index spike column, which is
moved to the last position so the renumbered indicators stay consistent;
expansion appends one spike-initialized column.
"""

from dataclasses import dataclass

import numpy as np

from .coss import active_dimension, cumulative_spike_probs, stick_breaking_weights


@dataclass
class AdaptationSchedule:
    eta0: float = -1.0
    eta1: float = -5e-4
    burn_in: int = 500

    def __post_init__(self):
        if self.eta0 > 0:
            raise ValueError("eta0 must be nonpositive")
        if self.eta1 >= 0:
            raise ValueError("eta1 must be negative")
        if self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")

    def probability(self, t):
        return float(np.exp(self.eta0 + self.eta1 * t))


def _refresh_weights(sh):
    sh.v[-1] = 1.0
    sh.omega = stick_breaking_weights(sh.v)
    sh.pi = cumulative_spike_probs(sh.omega)


def _contract(state):
    sh = state.shrinkage
    k = sh.k
    idx = np.arange(1, k + 1)
    active = np.flatnonzero(sh.rho > idx)
    spike = np.flatnonzero(sh.rho <= idx)
    keep = np.concatenate([active, spike[:1]])  # retained spike column goes last
    k_new = keep.size
    state.Z = np.ascontiguousarray(state.Z[:, keep])
    state.B = np.ascontiguousarray(state.B[:, keep])
    sh.theta = sh.theta[keep]
    sh.v = sh.v[keep]
    # renumber indicators: surviving active columns stay active at their new
    # positions, the retained spike column stays spiked
    sh.rho = np.arange(2, k_new + 2)
    sh.rho[-1] = k_new
    _refresh_weights(sh)
    return state


def _expand(state, prior, rng):
    sh = state.shrinkage
    k = sh.k
    n, q = state.Z.shape[0], state.B.shape[0]
    z_new = np.sqrt(prior.theta0) * rng.gen.standard_normal(n)
    b_new = prior.sigma_B * rng.gen.standard_normal(q)
    state.Z = np.column_stack([state.Z, z_new])
    state.B = np.column_stack([state.B, b_new])
    sh.theta = np.append(sh.theta, prior.theta0)
    sh.rho = np.append(sh.rho, k + 1)
    v = np.append(sh.v, 1.0)
    v[k - 1] = rng.gen.beta(prior.a_stick, 1.0)
    sh.v = v
    _refresh_weights(sh)
    return state


def maybe_adapt(state, t, schedule, prior, rng):
    """Possibly resize the truncation level after iteration t."""
    if t <= schedule.burn_in:
        return state
    if rng.gen.random() >= schedule.probability(t):
        return state
    kstar = active_dimension(state.shrinkage.rho)
    k = state.shrinkage.k
    if kstar < k - 1:
        return _contract(state)
    # the last column is structurally spiked (pi_k = 1), so "all columns
    # active" means kstar == k - 1
    return _expand(state, prior, rng)
