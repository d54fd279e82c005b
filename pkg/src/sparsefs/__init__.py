"""Exact row-sparse multi-class feature selection.

The core solvers minimize a least-squares fit plus a penalty on the
*number* of nonzero weight rows, sweeping a geometric ladder of penalty
strengths with warm starts so one run yields solutions at every sparsity
level. A convex row-norm-sum baseline, nearest-neighbor and softmax
evaluation, a synthetic generator and an exhaustive-enumeration oracle
round out the toolkit.

Conventions: feature matrices are ``d x N`` (features by samples), class
labels are ``1..C``, and feature indices in supports and selections are
1-based.
"""

from .baseline import l21_solve, row_soft_threshold
from .data import CenteredData, Dataset, center, one_hot_encode, stratified_split
from .errors import (
    CsvParseError,
    DataError,
    DivergenceError,
    ParameterError,
    ShapeError,
)
from .evaluation import (
    ClassifierConfig,
    ExperimentGrids,
    ExperimentReport,
    SoftmaxModel,
    TrialResult,
    accuracy,
    accuracy_curve,
    knn_predict,
    restrict_features,
    run_experiment,
    softmax_predict,
    softmax_train,
)
from .io import dataset_fingerprint, load_csv, save_csv
from .objective import (
    gradient,
    loss,
    objective_value,
    recover_bias,
    row_norms,
    spectral_bound,
    support,
)
from .oracle import brute_force_oracle
from .solver import (
    PathPoint,
    RegularizationPath,
    SolverConfig,
    ahiht_solve,
    hiht_solve,
    line_search_update,
    resolve_config,
    select_by_count,
)
from .synthetic import generate_synthetic
from .thresholding import gradient_step, iht_update, row_hard_threshold

__version__ = "0.1.0"

__all__ = [
    "CenteredData",
    "ClassifierConfig",
    "CsvParseError",
    "DataError",
    "Dataset",
    "DivergenceError",
    "ExperimentGrids",
    "ExperimentReport",
    "ParameterError",
    "PathPoint",
    "RegularizationPath",
    "ShapeError",
    "SoftmaxModel",
    "SolverConfig",
    "TrialResult",
    "accuracy",
    "accuracy_curve",
    "ahiht_solve",
    "brute_force_oracle",
    "center",
    "dataset_fingerprint",
    "generate_synthetic",
    "gradient",
    "gradient_step",
    "hiht_solve",
    "iht_update",
    "knn_predict",
    "l21_solve",
    "line_search_update",
    "load_csv",
    "loss",
    "objective_value",
    "one_hot_encode",
    "recover_bias",
    "resolve_config",
    "restrict_features",
    "row_hard_threshold",
    "row_norms",
    "row_soft_threshold",
    "run_experiment",
    "save_csv",
    "select_by_count",
    "softmax_predict",
    "softmax_train",
    "spectral_bound",
    "stratified_split",
    "support",
]
