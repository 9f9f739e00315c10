"""Upwind Petrov-Galerkin finite elements with bubble-enriched test spaces."""
from .errors import (
    BoundUnavailableError,
    DomainError,
    ParameterError,
    QuadratureError,
    SingularMatrixError,
    SizeError,
    ZeroPivotError,
)
from .core import Problem1D, Problem2D, PiecewiseLinearFE1D, PiecewiseLinearFE2D, UniformMesh1D
from .bubbles import BubbleSpec, exponential_average, special_beta
from .solver1d import DiscretizationConfig, Solution1D, solve_1d
from .solver2d import assemble_2d, solve_2d_dense, solve_2d_fast
from .study import StudySpec, observed_order, run_study

__all__ = [
    "BoundUnavailableError", "DomainError", "ParameterError", "QuadratureError",
    "SingularMatrixError", "SizeError", "ZeroPivotError",
    "Problem1D", "Problem2D", "PiecewiseLinearFE1D", "PiecewiseLinearFE2D", "UniformMesh1D",
    "BubbleSpec", "exponential_average", "special_beta",
    "DiscretizationConfig", "Solution1D", "solve_1d",
    "assemble_2d", "solve_2d_dense", "solve_2d_fast",
    "StudySpec", "observed_order", "run_study",
]
