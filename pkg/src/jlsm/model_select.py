"""Dimension-selection baselines: AIC, BIC, DIC, WAIC and K-fold CV.

All criteria operate on fixed-dimension fits with independent N(0, 1)
latent priors (shrinkage updates disabled).  The single parameter point
xi-hat needed by AIC/BIC/DIC is the posterior mean after rotating every
kept (Z, B) draw onto the last kept draw, since the latent coordinates
are only identified up to rotation.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.linalg import orthogonal_procrustes
from scipy.optimize import minimize
from scipy.special import expit

from .evaluate import EmptyChainError
from .fit import run_chain
from .model import (
    Dataset,
    Family,
    ModelState,
    _log1pexp,
    joint_log_likelihood,
    natural_params_attributes,
    natural_params_network,
)


def fit_fixed_dimension(dataset, k, config, seed=None):
    """Fit the joint model at a fixed truncation, shrinkage block frozen."""
    if k < 1:
        raise ValueError("k must be >= 1")
    cfg = dataclasses.replace(
        config,
        mode="fixed-k",
        k=int(k),
        seed=config.seed if seed is None else int(seed),
        adaptation=False,
    )
    return run_chain(dataset, cfg)


def aligned_posterior_mean(chain):
    """Posterior-mean parameter point with per-draw Procrustes alignment.

    Each kept (Z, B) pair is rotated onto the last kept Z before averaging
    so the coordinate means are coherent.  Requires a constant-k chain.
    """
    if len(chain) == 0:
        raise EmptyChainError("empty chain")
    ks = {Z.shape[1] for Z in chain.Zs}
    if len(ks) != 1:
        raise ValueError("alignment requires a constant truncation level")
    ref = chain.Zs[-1]
    z_sum = np.zeros_like(ref)
    b_sum = np.zeros_like(chain.Bs[-1])
    for Z, B in zip(chain.Zs, chain.Bs):
        rot, _ = orthogonal_procrustes(Z, ref)
        z_sum += Z @ rot
        b_sum += B @ rot
    s = len(chain)
    return ModelState(
        alpha=np.mean(chain.alphas, axis=0),
        gamma=np.mean(chain.gammas, axis=0),
        Z=z_sum / s,
        B=b_sum / s,
        sigma2=np.mean(chain.sigma2s, axis=0),
        aug_A=None,
        aug_Y=None,
    )


def parameter_count(n, q, k, family):
    """d = nk + qk + n + 2q (gaussian) or nk + qk + n + q (bernoulli)."""
    family = Family(family)
    base = n * k + q * k + n + q
    return base + q if family is Family.GAUSSIAN else base


def _chain_k(chain):
    ks = {Z.shape[1] for Z in chain.Zs}
    if len(ks) != 1:
        raise ValueError("criteria require a constant-k chain")
    return ks.pop()


def criterion_aic(chain, dataset):
    k = _chain_k(chain)
    d = parameter_count(dataset.n, dataset.q, k, chain.family)
    ll = joint_log_likelihood(dataset, aligned_posterior_mean(chain))
    return -2.0 * ll + 2.0 * d


def criterion_bic(chain, dataset):
    k = _chain_k(chain)
    d = parameter_count(dataset.n, dataset.q, k, chain.family)
    ll = joint_log_likelihood(dataset, aligned_posterior_mean(chain))
    return -2.0 * ll + 2.0 * d * np.log(dataset.n)


def _loglik_per_draw(chain, dataset):
    out = np.empty(len(chain))
    for s in range(len(chain)):
        st = ModelState(
            alpha=chain.alphas[s], gamma=chain.gammas[s],
            Z=chain.Zs[s], B=chain.Bs[s], sigma2=chain.sigma2s[s],
            aug_A=None, aug_Y=None,
        )
        out[s] = joint_log_likelihood(dataset, st)
    return out


def criterion_dic(chain, dataset):
    ll_hat = joint_log_likelihood(dataset, aligned_posterior_mean(chain))
    ll_bar = float(np.mean(_loglik_per_draw(chain, dataset)))
    p_dic = 2.0 * (ll_hat - ll_bar)
    return -2.0 * ll_hat + 2.0 * p_dic


def _pointwise_logdensities(chain, dataset, s):
    """Log densities of every dyad (i < i') and every observed cell, one draw."""
    alpha, gamma = chain.alphas[s], chain.gammas[s]
    Z, B, sigma2 = chain.Zs[s], chain.Bs[s], chain.sigma2s[s]
    iu = np.triu_indices(dataset.n, k=1)
    th_a = natural_params_network(alpha, Z)[iu]
    a = dataset.adjacency[iu]
    lp_net = a * th_a - _log1pexp(th_a)
    if dataset.q == 0:
        return lp_net
    th_y = natural_params_attributes(gamma, Z, B)
    y, mask = dataset.attributes, dataset.missing_mask
    if dataset.family is Family.GAUSSIAN:
        lp = -0.5 * (np.log(2.0 * np.pi * sigma2)[None, :]
                     + (y - th_y) ** 2 / sigma2[None, :])
    else:
        lp = y * th_y - _log1pexp(th_y)
    return np.concatenate([lp_net, lp[mask]])


def criterion_waic(chain, dataset):
    """Two-term WAIC over dyads and observed cells, streamed over draws."""
    s_total = len(chain)
    if s_total == 0:
        raise EmptyChainError("empty chain")
    lse = None  # running log-sum-exp of the pointwise densities
    mean = m2 = None  # Welford accumulators for the log-density variance
    for s in range(s_total):
        lp = _pointwise_logdensities(chain, dataset, s)
        if lse is None:
            lse = lp.copy()
            mean = lp.copy()
            m2 = np.zeros_like(lp)
        else:
            lse = np.logaddexp(lse, lp)
            delta = lp - mean
            mean += delta / (s + 1)
            m2 += delta * (lp - mean)
    lppd = float(np.sum(lse - np.log(s_total)))
    var = float(np.sum(m2 / (s_total - 1))) if s_total > 1 else 0.0
    return -2.0 * (lppd - var)


@dataclass
class CvResult:
    candidates: np.ndarray
    fold_loglik: np.ndarray  # folds x candidates held-out log-likelihoods
    mean_loglik: np.ndarray
    se_loglik: np.ndarray
    selected: int
    selected_1se: int


def _node_folds(n, folds, rng):
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if folds > n:
        raise ValueError(f"folds={folds} exceeds node count n={n}: empty fold")
    perm = rng.gen.permutation(n)
    return np.array_split(perm, folds)


def _subset_dataset(dataset, nodes):
    return Dataset(
        dataset.adjacency[np.ix_(nodes, nodes)],
        dataset.attributes[nodes],
        dataset.family,
        dataset.missing_mask[nodes],
    )


def _estimate_test_node(a_col, y_row, mask_row, train, dataset_family, sigma_alpha):
    """MAP of (alpha_i, z_i) for one held-out node given frozen train parameters.

    ``a_col`` holds the node's edges to the training nodes, ``y_row`` its
    own attribute row.  The conditional posterior is maximized with BFGS
    from the origin.
    """
    alpha_t, Z_t = train.alpha, train.Z
    gamma, B, sigma2 = train.gamma, train.B, train.sigma2
    k = Z_t.shape[1]

    def negloglik(x):
        ai, zi = x[0], x[1:]
        th = ai + alpha_t + Z_t @ zi
        val = -np.sum(a_col * th - _log1pexp(th))
        grad_common = expit(th) - a_col
        g_ai = np.sum(grad_common)
        g_zi = Z_t.T @ grad_common
        if y_row.size:
            th_y = gamma + B @ zi
            if dataset_family is Family.GAUSSIAN:
                resid = np.where(mask_row, (y_row - th_y) / sigma2, 0.0)
                val += 0.5 * np.sum(mask_row * (y_row - th_y) ** 2 / sigma2)
                g_zi -= B.T @ resid
            else:
                val -= np.sum(mask_row * (y_row * th_y - _log1pexp(th_y)))
                g_zi += B.T @ (mask_row * (expit(th_y) - y_row))
        # priors: alpha_i ~ N(0, sigma_alpha^2), z_i ~ N(0, I) (fixed-k slab)
        val += 0.5 * ai**2 / sigma_alpha**2 + 0.5 * np.dot(zi, zi)
        g_ai += ai / sigma_alpha**2
        g_zi += zi
        return val, np.concatenate([[g_ai], g_zi])

    res = minimize(negloglik, np.zeros(1 + k), jac=True, method="L-BFGS-B")
    return res.x[0], res.x[1:]


def _heldout_loglik(dataset, train_nodes, test_nodes, point, prior):
    """Log-likelihood of test dyads and test attribute rows under the fit."""
    n_test = test_nodes.size
    k = point.Z.shape[1]
    alpha_hat = np.empty(n_test)
    z_hat = np.empty((n_test, k))
    for t, i in enumerate(test_nodes):
        alpha_hat[t], z_hat[t] = _estimate_test_node(
            dataset.adjacency[i, train_nodes],
            dataset.attributes[i],
            dataset.missing_mask[i],
            point,
            dataset.family,
            prior.sigma_alpha,
        )
    ll = 0.0
    # test-train dyads
    th_tt = alpha_hat[:, None] + point.alpha[None, :] + z_hat @ point.Z.T
    a_tt = dataset.adjacency[np.ix_(test_nodes, train_nodes)]
    ll += float(np.sum(a_tt * th_tt - _log1pexp(th_tt)))
    # test-test dyads
    if n_test > 1:
        th = alpha_hat[:, None] + alpha_hat[None, :] + z_hat @ z_hat.T
        iu = np.triu_indices(n_test, k=1)
        a = dataset.adjacency[np.ix_(test_nodes, test_nodes)][iu]
        ll += float(np.sum(a * th[iu] - _log1pexp(th[iu])))
    # test attribute rows
    if dataset.q:
        th_y = point.gamma[None, :] + z_hat @ point.B.T
        y = dataset.attributes[test_nodes]
        mask = dataset.missing_mask[test_nodes]
        if dataset.family is Family.GAUSSIAN:
            lp = -0.5 * (np.log(2.0 * np.pi * point.sigma2)[None, :]
                         + (y - th_y) ** 2 / point.sigma2[None, :])
        else:
            lp = y * th_y - _log1pexp(th_y)
        ll += float(np.sum(lp[mask]))
    return ll


def kfold_cv(dataset, k_candidates, folds, config, rng):
    """Node-level K-fold CV over candidate dimensions with a 1-SE rule."""
    candidates = np.asarray(sorted(int(k) for k in k_candidates))
    if candidates.size == 0:
        raise ValueError("need at least one candidate dimension")
    assignments = _node_folds(dataset.n, folds, rng)
    table = np.empty((folds, candidates.size))
    for f, test_nodes in enumerate(assignments):
        test_nodes = np.sort(test_nodes)
        train_nodes = np.setdiff1d(np.arange(dataset.n), test_nodes)
        train_data = _subset_dataset(dataset, train_nodes)
        for c, k in enumerate(candidates):
            seed = config.seed + 1000003 * (f * candidates.size + c) + 1
            chain = fit_fixed_dimension(train_data, k, config, seed=seed)
            point = aligned_posterior_mean(chain)
            table[f, c] = _heldout_loglik(
                dataset, train_nodes, test_nodes, point, config.prior
            )
    mean = table.mean(axis=0)
    se = table.std(axis=0, ddof=1) / np.sqrt(folds) if folds > 1 else np.zeros_like(mean)
    selected, selected_1se = one_se_selection(candidates, mean, se)
    return CvResult(
        candidates=candidates,
        fold_loglik=table,
        mean_loglik=mean,
        se_loglik=se,
        selected=selected,
        selected_1se=selected_1se,
    )


def one_se_selection(candidates, mean, se):
    """(argmax choice, smallest candidate within one SE of the best)."""
    candidates = np.asarray(candidates)
    mean = np.asarray(mean, dtype=float)
    se = np.asarray(se, dtype=float)
    best = int(np.argmax(mean))
    within = np.flatnonzero(mean >= mean[best] - se[best])
    return int(candidates[best]), int(candidates[within[0]])


def criteria_table(dataset, k_candidates, config):
    """AIC/BIC/DIC/WAIC for each candidate k, as a list of row dicts."""
    rows = []
    for i, k in enumerate(sorted(int(k) for k in k_candidates)):
        chain = fit_fixed_dimension(dataset, k, config, seed=config.seed + i)
        rows.append({
            "k": k,
            "aic": criterion_aic(chain, dataset),
            "bic": criterion_bic(chain, dataset),
            "dic": criterion_dic(chain, dataset),
            "waic": criterion_waic(chain, dataset),
        })
    return rows
