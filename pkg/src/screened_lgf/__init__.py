"""Lattice Green's functions of the 2D screened Poisson equation."""
from .core import (
    LatticeConfig,
    LatticePoint,
    Method,
    MethodChoice,
    Tolerance,
    ToleranceError,
    canonicalize,
    select_method,
)
from .estimators import ScreenedPoissonLGF, evaluate_points
from .fft_batch import LgfRow, LgfTable, batch_row, batch_table
from .periodic3d import Periodic3DConfig, PeriodicPoissonSolver, solve_poisson3d
from .quad1d import n_opt_scan, n_quad_points, trapezoid_eval, unscreened_diff
from .randomwalk import ReturnProbability, WalkParams, return_probability
from .series import SeriesPlan, series_eval, terms_needed, truncation_bound

__version__ = "0.1.0"

__all__ = [
    "LatticeConfig",
    "LatticePoint",
    "LgfRow",
    "LgfTable",
    "Method",
    "MethodChoice",
    "Periodic3DConfig",
    "PeriodicPoissonSolver",
    "ReturnProbability",
    "ScreenedPoissonLGF",
    "SeriesPlan",
    "Tolerance",
    "ToleranceError",
    "WalkParams",
    "batch_row",
    "batch_table",
    "canonicalize",
    "evaluate_points",
    "n_opt_scan",
    "n_quad_points",
    "return_probability",
    "select_method",
    "series_eval",
    "solve_poisson3d",
    "terms_needed",
    "trapezoid_eval",
    "truncation_bound",
    "unscreened_diff",
]
