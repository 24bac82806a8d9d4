"""Posterior summaries and the evaluation metrics of the simulation studies."""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .model import Family


class EmptyChainError(ValueError):
    """Operation requires at least one kept iteration."""


@dataclass
class PosteriorChain:
    """Kept (post burn-in, thinned) draws of one MCMC run.

    Z and B are stored per iteration because the truncation level may change
    across kept iterations; their Gram products are dimension-stable.
    """

    family: Family
    alphas: list
    gammas: list
    Zs: list
    Bs: list
    sigma2s: list
    kstar: np.ndarray
    loglik: np.ndarray
    imputed: list = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.alphas)

    def __post_init__(self):
        if len(self.kstar) != len(self.alphas):
            raise ValueError("K* trace length must equal kept iterations")


def posterior_mean_state(chain):
    """Elementwise posterior means; Z and B summarized by mean Gram products."""
    if len(chain) == 0:
        raise EmptyChainError("empty chain")
    out = {
        "alpha": np.mean(chain.alphas, axis=0),
        "gamma": np.mean(chain.gammas, axis=0),
        "ZZt": np.mean([Z @ Z.T for Z in chain.Zs], axis=0),
        "BBt": np.mean([B @ B.T for B in chain.Bs], axis=0),
        "ZBt": np.mean([Z @ B.T for Z, B in zip(chain.Zs, chain.Bs)], axis=0),
    }
    if chain.family is Family.GAUSSIAN:
        out["sigma2"] = np.mean(chain.sigma2s, axis=0)
    return out


def metric_delta_Z(chain, truth):
    """Normalized Frobenius error of the latent Gram matrix."""
    est = np.mean([Z @ Z.T for Z in chain.Zs], axis=0)
    ref = truth.Z0 @ truth.Z0.T
    if est.shape != ref.shape:
        raise ValueError("chain and truth have different node counts")
    n = ref.shape[0]
    return float(np.linalg.norm(est - ref) / n)


def aligned_coordinate_means(chain):
    """Coordinate means of Z and B after rotating each draw onto a reference.

    Draws are zero-padded to the widest truncation seen, then rotated by the
    orthogonal Procrustes solution aligning Z to the last kept draw; the same
    rotation is applied to B so the pair stays coherent.  Columns whose
    variance is spiked carry prior noise in B that averages out here, which
    the Gram mean cannot remove.
    """
    if len(chain) == 0:
        raise EmptyChainError("empty chain")
    from scipy.linalg import orthogonal_procrustes

    k_max = max(Z.shape[1] for Z in chain.Zs)

    def pad(m):
        if m.shape[1] == k_max:
            return m
        return np.hstack([m, np.zeros((m.shape[0], k_max - m.shape[1]))])

    ref = pad(chain.Zs[-1])
    z_sum = np.zeros_like(ref)
    b_sum = np.zeros((chain.Bs[-1].shape[0], k_max))
    for Z, B in zip(chain.Zs, chain.Bs):
        Zp, Bp = pad(Z), pad(B)
        rot, _ = orthogonal_procrustes(Zp, ref)
        z_sum += Zp @ rot
        b_sum += Bp @ rot
    return z_sum / len(chain), b_sum / len(chain)


def metric_delta_B(chain, truth):
    """Normalized Frobenius error of the loading Gram matrix.

    Each draw's Gram product is restricted to its active latent subspace:
    loadings on a spiked column are not identified by the data, so their Gram
    contribution is pure prior variance and would inflate the error by about
    sqrt(q)/q per spiked column.  The restriction projects the loadings onto
    the span of the top K* principal directions of that draw's latent
    positions, which keeps the metric invariant under joint rotations.
    """
    if len(chain) == 0:
        raise EmptyChainError("empty chain")
    q = chain.Bs[0].shape[0]
    total = np.zeros((q, q))
    for Z, B, ks in zip(chain.Zs, chain.Bs, chain.kstar):
        ks = int(ks)
        if ks >= Z.shape[1]:
            total += B @ B.T
            continue
        if ks <= 0:
            continue
        _, vecs = np.linalg.eigh(Z.T @ Z)
        proj = B @ vecs[:, -ks:]
        total += proj @ proj.T
    est = total / len(chain)
    ref = truth.B0 @ truth.B0.T
    if est.shape != ref.shape:
        raise ValueError("chain and truth have different attribute counts")
    q = ref.shape[0]
    return float(np.linalg.norm(est - ref) / q)


def metric_delta_alpha(chain, truth):
    est = np.mean(chain.alphas, axis=0)
    return float(np.linalg.norm(est - truth.alpha0) / np.sqrt(est.size))


def metric_delta_gamma(chain, truth):
    est = np.mean(chain.gammas, axis=0)
    return float(np.linalg.norm(est - truth.gamma0) / np.sqrt(est.size))


def posterior_mode_dimension(chain):
    """Most frequent K* among kept iterations; ties break to the smaller value."""
    kstar = np.asarray(chain.kstar if hasattr(chain, "kstar") else chain)
    if kstar.size == 0:
        raise EmptyChainError("empty K* trace")
    counts = Counter(kstar.tolist())
    best = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
    return int(best[0])


def dimension_accuracy(k_hats, k0):
    """(Acc, MAB): hit rate and mean absolute bias over the misses (0 if none)."""
    k_hats = np.asarray(k_hats)
    if k_hats.size == 0:
        raise ValueError("need at least one replication")
    hits = k_hats == k0
    acc = float(np.mean(hits))
    misses = np.abs(k_hats[~hits] - k0)
    mab = float(np.mean(misses)) if misses.size else 0.0
    return acc, mab


def auroc(scores, labels=None):
    """Rank-based AUROC; ties between scores count one half.

    Accepts either (scores, labels) arrays or a single iterable of
    (score, label) pairs.
    """
    if labels is None:
        pairs = np.asarray(list(scores), dtype=float)
        scores, labels = pairs[:, 0], pairs[:, 1]
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUROC needs both positive and negative labels")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(scores.size)
    sorted_scores = scores[order]
    # midranks for tied scores
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    rank_sum = ranks[labels].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))
