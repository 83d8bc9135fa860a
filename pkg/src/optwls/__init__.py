"""Optimal weighted least-squares approximation from structured random samples.

The package approximates functions u: X -> R in L2 from noiseless pointwise
evaluations. Samples are drawn from the distributions induced by an
orthonormal polynomial basis and reweighted by the inverse Christoffel ratio,
which keeps the normal-equations Gramian close to the identity with a number
of samples proportional to the space dimension up to a logarithmic factor.
Nested approximation spaces are grown adaptively over downward-closed
multi-index sets, recycling samples across iterations.
"""

from .orthopoly import (
    HERMITE,
    LEGENDRE,
    GaussRule,
    UnivariateFamily,
    eval_all_orthonormal,
    eval_orthonormal,
    gauss_rule,
    induced_cdf,
    sample_induced,
)
from .multiindex import IndexSet, bulk, is_downward_closed, new_root
from .basis import DegenerateWeightError, TensorBasis
from .sampling import (
    THETA,
    BudgetRule,
    FlatSampleSet,
    MixtureMeasure,
    StructuredSampleSet,
    binomial_draw,
    budget_bounds_check,
    sample_chi,
    zeta_value,
)
from .estimator import (
    Estimator,
    GramianSystem,
    assemble,
    conditioned,
    residual_inner_products,
    solve_wls,
    spectral_deviation,
)
from .adaptive import (
    AdaptiveConfig,
    AdaptiveTrace,
    StabilityLoopError,
    estimate_cv_error,
    make_test_function,
    run_adaptive,
    run_fully_adaptive,
    test_function,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveConfig",
    "AdaptiveTrace",
    "BudgetRule",
    "DegenerateWeightError",
    "Estimator",
    "FlatSampleSet",
    "GaussRule",
    "GramianSystem",
    "HERMITE",
    "IndexSet",
    "LEGENDRE",
    "MixtureMeasure",
    "StabilityLoopError",
    "StructuredSampleSet",
    "TensorBasis",
    "THETA",
    "UnivariateFamily",
    "assemble",
    "binomial_draw",
    "budget_bounds_check",
    "bulk",
    "conditioned",
    "estimate_cv_error",
    "eval_all_orthonormal",
    "eval_orthonormal",
    "gauss_rule",
    "induced_cdf",
    "is_downward_closed",
    "make_test_function",
    "new_root",
    "residual_inner_products",
    "run_adaptive",
    "run_fully_adaptive",
    "sample_chi",
    "sample_induced",
    "solve_wls",
    "spectral_deviation",
    "test_function",
    "zeta_value",
]
