"""Exception types raised across the package."""


class HamstatError(Exception):
    """Base class for all package errors."""


class EvaluationAtSingularity(HamstatError, ValueError):
    pass


class LoopTooCloseToSingularity(HamstatError, ValueError):
    pass


class ResolutionTooCoarse(HamstatError, ValueError):
    pass


class IncompatibleBoundaryData(HamstatError, ValueError):
    """Raised when the boundary datum violates the compatibility condition at t = 1."""


class SingularityOnNode(HamstatError, ValueError):
    pass


class TooCoarse(HamstatError, ValueError):
    pass


class ContourCrossesZeroSet(HamstatError, ValueError):
    pass


class DegenerateMetric(HamstatError, ValueError):
    pass


class NoConvergence(HamstatError, RuntimeError):
    def __init__(self, iterations, residual, message=None):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            message or f"no convergence after {iterations} iterations (residual {residual:.3e})"
        )


class PathDependence(HamstatError, RuntimeError):
    pass


class UniquenessViolation(HamstatError, RuntimeError):
    pass
