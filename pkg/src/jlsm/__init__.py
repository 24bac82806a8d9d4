"""Joint latent space models for networks with node attributes.

One set of latent node positions drives both the edge probabilities of an
undirected binary network and the distribution of node attributes
(Gaussian linear-factor or Bernoulli two-parameter logistic).  The latent
dimension is selected automatically through a cumulative ordered
spike-and-slab prior with adaptive truncation during Gibbs sampling.
"""

__version__ = "0.1.0"

from .adaptive import AdaptationSchedule, maybe_adapt
from .config import RunConfig, read_config, write_config
from .coss import ShrinkageState, active_dimension
from .distributions import RngStream
from .evaluate import (
    PosteriorChain,
    auroc,
    dimension_accuracy,
    metric_delta_alpha,
    metric_delta_B,
    metric_delta_gamma,
    metric_delta_Z,
    posterior_mean_state,
    posterior_mode_dimension,
)
from .fit import run_chain
from .model import Dataset, Family, ModelState, PriorConfig, joint_log_likelihood
from .model_select import (
    criterion_aic,
    criterion_bic,
    criterion_dic,
    criterion_waic,
    fit_fixed_dimension,
    kfold_cv,
)
from .simulate import GroundTruth, SimDesign, generate_dataset
from .storage import load_chain, persist_chain, read_dataset, write_dataset

__all__ = [
    "AdaptationSchedule", "Dataset", "Family", "GroundTruth", "ModelState",
    "PosteriorChain", "PriorConfig", "RngStream", "RunConfig", "ShrinkageState",
    "SimDesign", "active_dimension", "auroc", "criterion_aic", "criterion_bic",
    "criterion_dic", "criterion_waic", "dimension_accuracy", "fit_fixed_dimension",
    "generate_dataset", "joint_log_likelihood", "kfold_cv", "load_chain",
    "maybe_adapt", "metric_delta_B", "metric_delta_Z", "metric_delta_alpha",
    "metric_delta_gamma", "persist_chain", "posterior_mean_state",
    "posterior_mode_dimension", "read_config", "read_dataset", "run_chain",
    "write_config", "write_dataset",
]
