"""Top-level MCMC driver: initialization, cycle loop, adaptation, thinning."""

import numpy as np

from . import coss
from .adaptive import maybe_adapt
from .evaluate import PosteriorChain
from .gibbs_bernoulli import gibbs_cycle_bernoulli
from .gibbs_gaussian import SamplerRngs, gibbs_cycle_gaussian
from .model import Family, ModelState, joint_log_likelihood


def initial_state(dataset, config, rngs):
    """Dispersed but stable starting point for one chain."""
    n, q, k = dataset.n, dataset.q, config.k
    prior = config.prior
    gen = rngs.params.gen
    state = ModelState(
        alpha=np.zeros(n),
        gamma=np.zeros(q),
        Z=gen.standard_normal((n, k)),
        B=prior.sigma_B * gen.standard_normal((q, k)),
        sigma2=np.ones(q),
        aug_A=np.zeros((n, n)),
        aug_Y=np.zeros((n, q)),
    )
    if config.mode == "fixed-k":
        # degenerate shrinkage block: every column is a unit-variance slab
        # column and the indicators never move, so K* == k throughout
        state.shrinkage = coss.ShrinkageState(
            v=np.concatenate([np.zeros(k - 1), [1.0]]),
            omega=np.concatenate([np.zeros(k - 1), [1.0]]),
            pi=np.concatenate([np.zeros(k - 1), [1.0]]),
            rho=np.full(k, k + 1, dtype=np.int64),
            theta=np.ones(k),
        )
    else:
        sh = coss.sample_prior_shrinkage(prior, k, rngs.shrinkage)
        # start with every column but the last treated as active slab
        sh.rho = np.full(k, k, dtype=np.int64)
        sh.theta = np.concatenate([np.ones(k - 1), [prior.theta0]])
        state.shrinkage = sh
    return state


def run_chain(dataset, config, progress=None):
    """Run one MCMC chain and return the kept draws as a PosteriorChain.

    ``progress``, if given, is called with the iteration number every 1000
    cycles.  K* and the joint log-likelihood are recorded before any
    adaptation move so they describe the state that produced the draw.
    """
    if dataset.family is not config.family:
        raise ValueError(
            f"dataset family {dataset.family.value} != config family "
            f"{config.family.value}"
        )
    rngs = SamplerRngs.from_seed(config.seed)
    state = initial_state(dataset, config, rngs)
    cycle = (
        gibbs_cycle_gaussian if config.family is Family.GAUSSIAN
        else gibbs_cycle_bernoulli
    )
    update_coss = config.mode == "coss"
    adapting = update_coss and config.adaptation
    impute = config.imputation and not dataset.missing_mask.all()

    alphas, gammas, Zs, Bs, sigma2s = [], [], [], [], []
    kstar_trace, loglik_trace = [], []
    imputed = [] if impute else None

    for t in range(1, config.iterations + 1):
        cycle(
            state, dataset, config.prior, rngs,
            update_coss=update_coss, impute=impute, pg_blocks=config.pg_blocks,
        )
        if t > config.burn_in and (t - config.burn_in) % config.thinning == 0:
            alphas.append(state.alpha.copy())
            gammas.append(state.gamma.copy())
            Zs.append(state.Z.copy())
            Bs.append(state.B.copy())
            sigma2s.append(state.sigma2.copy())
            kstar_trace.append(coss.active_dimension(state.shrinkage.rho))
            loglik_trace.append(joint_log_likelihood(dataset, state))
            if impute:
                imputed.append(state.imputed_y.copy())
        if adapting:
            maybe_adapt(state, t, config.schedule, config.prior, rngs.adapt)
        if progress is not None and t % 1000 == 0:
            progress(t)

    return PosteriorChain(
        family=config.family,
        alphas=alphas,
        gammas=gammas,
        Zs=Zs,
        Bs=Bs,
        sigma2s=sigma2s,
        kstar=np.asarray(kstar_trace, dtype=np.int64),
        loglik=np.asarray(loglik_trace),
        imputed=imputed,
        meta={
            "seed": config.seed,
            "mode": config.mode,
            "iterations": config.iterations,
            "burn_in": config.burn_in,
            "thinning": config.thinning,
            "config_digest": config.digest(),
            "final_k": state.k,
        },
    )
