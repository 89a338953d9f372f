"""Exception types raised by capdrop."""


class CapdropError(Exception):
    """Base class for all errors raised by this package."""


class GridTooSmallError(CapdropError, ValueError):
    """The boundary grid cannot resolve the requested lattice modes alias-free."""


class SymmetryViolationError(CapdropError):
    """A grid function is too far from the m-fold/reflection symmetry lattice."""

    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class DivisionFloorError(CapdropError, ZeroDivisionError):
    """A pointwise divisor dipped below the configured floor."""


class DegenerateMapError(DivisionFloorError):
    """|Z_alpha| vanishes (numerically) somewhere on the circle."""


class CurvatureRealnessError(CapdropError):
    """Computed curvature has a non-negligible imaginary part."""


class StepTooLargeError(CapdropError, ValueError):
    pass


class NewtonFailure(CapdropError):
    """Newton's method did not converge, or the bordered system is singular."""

    def __init__(self, message, iterations=0, residual=float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class RankDeficiencyError(CapdropError):
    """The Jacobian has more than one null direction at a continuation point."""


class BranchFileError(CapdropError, ValueError):
    """Malformed branch JSONL file."""
