"""Bayesian network structure learning with skew-reweighted sparse candidate search."""

from .evaluation import blanket_recall, markov_blanket, mb_scores
from .experiment import (
    ExperimentConfig,
    ResultRow,
    RowKey,
    compute_row,
    derive_seed,
    grid_keys,
    read_rows,
    run_experiment,
)
from .generators import GeneratorSpec, ci_order, function_from_cpt, generate
from .network import (
    BayesNet,
    Cpt,
    CycleError,
    Dag,
    DataFormatError,
    Dataset,
    ZeroProbabilityError,
    fit_cpts,
    forward_sample,
    log_likelihood,
    pack_configs,
    topological_order,
)
from .sparse_candidate import LearnConfig, RunReport, run_skewed_sc, run_standard_sc

__all__ = [
    "BayesNet",
    "Cpt",
    "CycleError",
    "Dag",
    "DataFormatError",
    "Dataset",
    "ExperimentConfig",
    "GeneratorSpec",
    "LearnConfig",
    "ResultRow",
    "RowKey",
    "RunReport",
    "ZeroProbabilityError",
    "blanket_recall",
    "ci_order",
    "compute_row",
    "derive_seed",
    "fit_cpts",
    "forward_sample",
    "function_from_cpt",
    "generate",
    "grid_keys",
    "log_likelihood",
    "markov_blanket",
    "mb_scores",
    "pack_configs",
    "read_rows",
    "run_experiment",
    "run_skewed_sc",
    "run_standard_sc",
    "topological_order",
]

__version__ = "0.1.0"
