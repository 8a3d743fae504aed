"""Converging (Guderley) and reflected shock similarity solutions for the
radial Euler equations, with an exact-rational polynomial certifier."""

__version__ = "0.1.0"

from .collapse import LambdaResult, collapse_trajectory, find_lambda_std
from .errors import (
    ConvergenceError,
    DomainError,
    GuderleyError,
    MatchingError,
    TheoryViolation,
)
from .fields import GlobalSolution, evaluate, shock_radius, solve_global
from .jump_map import jump, jump_inverse
from .phase_plane import Params, PhasePoint, critical_points, make_params, make_params_z

__all__ = [
    "ConvergenceError",
    "DomainError",
    "GlobalSolution",
    "GuderleyError",
    "LambdaResult",
    "MatchingError",
    "Params",
    "PhasePoint",
    "TheoryViolation",
    "collapse_trajectory",
    "critical_points",
    "evaluate",
    "find_lambda_std",
    "jump",
    "jump_inverse",
    "make_params",
    "make_params_z",
    "shock_radius",
    "solve_global",
]
