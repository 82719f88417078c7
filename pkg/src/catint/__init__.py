"""Exact and numerical integration as the unique structure-preserving map out of dyadic step functions.

The pieces, bottom up: scalar backends (:mod:`scalars`), finite-dimensional
algebras and quiver path algebras (:mod:`algebra`), distribution-function
measures on boxes (:mod:`measure`), step functions on the dyadic tower
(:mod:`stepfn`), the recursion engine (:mod:`engine`), shipped targets
(:mod:`targets`) and the command line (:mod:`cli`).
"""
from .algebra import (Algebra, Arrow, Quiver, TauMap, algebra_from_json, algebra_norm_p,
                      diagonal_algebra, field_algebra, path_algebra_from_quiver, tau_from_vertex,
                      validate_algebra, validate_tau)
from .engine import (ConvergenceReport, TargetObject, theta, theta_limit, theta_recursive,
                     validate_target, verify_morphism_square, verify_uniqueness)
from .errors import CatIntError
from .measure import BoxMeasure, DistributionMeasure, SplitScheme, cell_measure, interval_measure
from .scalars import Backend
from .stepfn import (StepFunction, direct_sum_norm, juxtapose, module_action, refine, sample,
                     split, step_norm_p)
from .targets import (PiecewiseLinear, antiderivative_target, antiderive, direct_sum,
                      fourier_coefficient, integrate, integration_target, mean_target,
                      moment_target, poly_norm, sampling_l1_error, weak_derivative, zero_target)

__version__ = "0.1.0"

__all__ = [
    "Algebra", "Arrow", "Backend", "BoxMeasure", "CatIntError", "ConvergenceReport",
    "DistributionMeasure", "PiecewiseLinear", "Quiver", "SplitScheme", "StepFunction",
    "TargetObject", "TauMap", "algebra_from_json", "algebra_norm_p", "antiderivative_target",
    "antiderive", "cell_measure", "diagonal_algebra", "direct_sum", "direct_sum_norm",
    "field_algebra", "fourier_coefficient", "integrate", "integration_target",
    "interval_measure", "juxtapose", "mean_target", "module_action", "moment_target",
    "path_algebra_from_quiver", "poly_norm", "refine", "sample", "sampling_l1_error", "split",
    "step_norm_p", "tau_from_vertex", "theta", "theta_limit", "theta_recursive",
    "validate_algebra", "validate_tau", "validate_target", "verify_morphism_square",
    "verify_uniqueness", "weak_derivative", "zero_target",
]
