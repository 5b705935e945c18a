"""Exception hierarchy shared by the numerical modules and the CLI."""


class QCInterpError(Exception):
    """Base class for all errors raised by qcinterp."""


class OutOfRange(QCInterpError, ValueError):
    pass


class BadQuantumNumber(QCInterpError, ValueError):
    pass


class GridMismatch(QCInterpError, ValueError):
    pass


class ClassicalSingularity(QCInterpError, ArithmeticError):
    """A Gaussian-basis quantity diverges at lambda -> 1; use the classical branch."""


class ConvergenceFailure(QCInterpError, RuntimeError):
    pass


class PicardDivergence(ConvergenceFailure):
    """The per-step fixed-point iteration of the nonlinear propagator hit its cap.

    ``step`` is the (1-based) index of the time step that failed.
    """

    def __init__(self, message, step=None, residual=None):
        super().__init__(message)
        self.step = step
        self.residual = residual


class TrajectoryEscaped(QCInterpError, RuntimeError):
    pass


class NoRootInBracket(QCInterpError, ValueError):
    pass


class ConfigError(QCInterpError, ValueError):
    pass


class ParseError(QCInterpError, ValueError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row
