"""Exception types raised by the solver stack."""


class SinkflowError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SinkflowError, ValueError):
    """An angle lies outside the interval an operation is defined on."""


class SingularKernelError(SinkflowError, ValueError):
    """The kernel was evaluated on its diagonal, where it is infinite."""


class AliasingError(SinkflowError, ValueError):
    """Too many sine modes were requested for the number of grid nodes."""


class PreconditionError(SinkflowError, ValueError):
    """An operator received an argument outside its admissible cone."""


class RegimeError(SinkflowError, ValueError):
    """The Froude number lies outside the range where a result applies."""


class ResolutionError(SinkflowError, RuntimeError):
    """The grid is too coarse to resolve a required feature."""


class FitQualityError(ResolutionError):
    """Too few resolved points near the cusp to fit the power law."""


class ConvergenceError(SinkflowError, RuntimeError):
    """Picard iteration hit its iteration cap.

    The partially converged iterate and the :class:`SolveReport` are kept on
    the exception so callers can still inspect or serialize them.
    """

    def __init__(self, message, report=None, zeta=None):
        super().__init__(message)
        self.report = report
        self.zeta = zeta


class DivergenceError(ConvergenceError):
    """An iterate became non-finite."""


class RegimeWarning(UserWarning):
    """The Froude number is outside the range where convergence is proven."""
