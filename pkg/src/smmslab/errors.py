"""Exception types raised across the toolkit."""


class SmmsError(Exception):
    """Base class for toolkit errors."""


class InvalidParameterError(SmmsError, ValueError):
    """A parameter is outside its documented range."""


class DegenerateMetricError(SmmsError, ArithmeticError):
    """The metric is not positive definite at an evaluation point."""


class PreconditionError(SmmsError, ValueError):
    """An operation's input violates a stated precondition."""


class ConvergenceError(SmmsError, RuntimeError):
    """An iterative solver hit its iteration cap.

    ``residuals`` holds whatever residual history the solver collected.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals
