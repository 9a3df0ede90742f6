"""Class-pairwise parameterized NMF toolkit.

Trains penalized NMF variants (graph-regularized and feature-relationship)
per class-pair, tunes the per-pair penalty weights with a continuous
genetic algorithm under cross-validation, and fuses per-pair nearest-
neighbor predictions by majority vote.
"""

from ._backend import available_backends, backend_name
from .classify import (
    LatentModel,
    PairModel,
    VoteTally,
    knn_label,
    majority_vote,
    predict,
    predict_single,
    project,
)
from .data import BlobSpec, RawTable, load_csv, make_blobs, minmax_scale, select_k_best, train_test_split
from .errors import ContractViolation, DataError, SingularMatrixError
from .experiment import (
    ExperimentReport,
    RunConfig,
    aggregate_gap,
    emit_report,
    load_report,
    run_experiment,
)
from .ga import Chromosome, GaConfig, GaTrace, init_population, mutate, one_point_crossover, optimize, tournament_select
from .linalg import frobenius_sq, hadamard_update, matmul, solve_spd
from .solvers import (
    FactorPair,
    NeighborGraph,
    SolverConfig,
    build_graph,
    frnmf_solve,
    gnmf_solve,
    init_factors,
    nmf_solve,
)
from .training import (
    FoldPlan,
    LabeledDataset,
    PairIndex,
    PairwiseEvaluator,
    TrainedEnsemble,
    UnmfEvaluator,
    enumerate_pairs,
    evaluate_chromosome,
    evaluate_unmf,
    fit_final,
    make_folds,
    subset,
)

__version__ = "0.1.0"

__all__ = [
    "available_backends",
    "backend_name",
    "LatentModel",
    "PairModel",
    "VoteTally",
    "knn_label",
    "majority_vote",
    "predict",
    "predict_single",
    "project",
    "BlobSpec",
    "RawTable",
    "load_csv",
    "make_blobs",
    "minmax_scale",
    "select_k_best",
    "train_test_split",
    "ContractViolation",
    "DataError",
    "SingularMatrixError",
    "ExperimentReport",
    "RunConfig",
    "aggregate_gap",
    "emit_report",
    "load_report",
    "run_experiment",
    "Chromosome",
    "GaConfig",
    "GaTrace",
    "init_population",
    "mutate",
    "one_point_crossover",
    "optimize",
    "tournament_select",
    "frobenius_sq",
    "hadamard_update",
    "matmul",
    "solve_spd",
    "FactorPair",
    "NeighborGraph",
    "SolverConfig",
    "build_graph",
    "frnmf_solve",
    "gnmf_solve",
    "init_factors",
    "nmf_solve",
    "FoldPlan",
    "LabeledDataset",
    "PairIndex",
    "PairwiseEvaluator",
    "TrainedEnsemble",
    "UnmfEvaluator",
    "enumerate_pairs",
    "evaluate_chromosome",
    "evaluate_unmf",
    "fit_final",
    "make_folds",
    "subset",
]
