"""Spectral computation of rotating capillary drops with m-fold symmetry.

Drops are described by a Riemann map ``Z(w) = sum_n a_n w**(m n + 1)``; the
package evaluates the boundary equations, locates bifurcations from the circle
and continues the resulting branches.
"""
from .bifurcation import (BifurcationPoint, bifurcation_speed, bifurcation_table, branch_seed,
                          make_bifurcation_point)
from .continuation import (BranchRecord, ContinuationConfig, SolutionPoint, classify_alternative,
                           compute_tangent, continue_branch, newton_correct)
from .errors import (BranchFileError, CapdropError, CurvatureRealnessError, DegenerateMapError,
                     DivisionFloorError, GridTooSmallError, NewtonFailure, RankDeficiencyError,
                     StepTooLargeError, SymmetryViolationError)
from .residual import (DiagnosticsReport, ResidualReport, chord_arc_constant, curvature,
                       decay_slope, diagnostics, jacobian_analytic, jacobian_fd, residual_complex,
                       residual_real, trivial_linearization)
from .spectral import LatticeCoeffs, SymmetryDefect, to_coeffs, to_grid

__version__ = "0.1.0"

__all__ = [
    "BifurcationPoint",
    "bifurcation_speed",
    "bifurcation_table",
    "branch_seed",
    "make_bifurcation_point",
    "BranchRecord",
    "ContinuationConfig",
    "SolutionPoint",
    "classify_alternative",
    "compute_tangent",
    "continue_branch",
    "newton_correct",
    "BranchFileError",
    "CapdropError",
    "CurvatureRealnessError",
    "DegenerateMapError",
    "DivisionFloorError",
    "GridTooSmallError",
    "NewtonFailure",
    "RankDeficiencyError",
    "StepTooLargeError",
    "SymmetryViolationError",
    "DiagnosticsReport",
    "ResidualReport",
    "chord_arc_constant",
    "curvature",
    "decay_slope",
    "diagnostics",
    "jacobian_analytic",
    "jacobian_fd",
    "residual_complex",
    "residual_real",
    "trivial_linearization",
    "LatticeCoeffs",
    "SymmetryDefect",
    "to_coeffs",
    "to_grid",
]
