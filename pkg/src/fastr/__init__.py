"""FasTR: sparse unit-rank higher-order tensor regression with closed-form
alternating updates."""

__version__ = "0.1.0"

from ._backend import active_backend, available_backends
from .estimator import (
    FitConfig,
    FitReport,
    NumericDomainError,
    fit,
    predict,
    ridge_solve,
    soft_threshold,
    update_component,
)
from .evaluate import (
    CVGrid,
    CVResult,
    auc,
    coefficient_error,
    kfold_cv,
    mse,
    train_test_split,
)
from .simulate import SimOutput, SimSpec, gen_dataset, gen_factors
from .tensor import (
    ShapeMismatchError,
    frobenius_norm,
    inner_product,
    mode_contract,
    outer_product,
    projection,
)
