"""Exception types raised by the library."""


class XXZError(Exception):
    """Base class for all library errors."""


class DomainError(XXZError, ValueError):
    """Parameters outside the region where a quantity is defined."""


class PoleError(XXZError, ArithmeticError):
    """Evaluation at (or numerically on top of) a pole."""


class AccuracyError(XXZError, ArithmeticError):
    """A truncation or quadrature budget could not reach its accuracy target."""


class SingularSystemError(XXZError, ArithmeticError):
    """The discretised linear system could not be solved."""


class BracketError(DomainError):
    """A root bracket does not enclose a sign change."""
