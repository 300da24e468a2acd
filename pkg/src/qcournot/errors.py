"""Exception types raised by the solvers."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap.

    The last iterate is kept on ``last`` so callers can inspect how far it got.
    """

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class SecondOrderConditionError(RuntimeError):
    """The curvature condition d2(Var)/dq2^2 > -2 fails at the candidate root."""


class RegionInconsistencyError(RuntimeError):
    """Derivative signs match none of the four region patterns A-D."""
