"""Exception and warning types raised by mirrorspec."""


class MirrorSpecError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MirrorSpecError, ValueError):
    """An argument lies outside the domain of the function."""


class PoleError(DomainError):
    """The gamma function was evaluated at a pole."""


class NonConvergence(MirrorSpecError, ArithmeticError):
    """A quadrature or extrapolation failed to reach its tolerance."""


class TrajectoryOverflow(MirrorSpecError, OverflowError):
    """The worldline was evaluated where the hyperbolic functions overflow."""


class TailBoundExceeded(MirrorSpecError, ArithmeticError):
    """The remainder of a semi-infinite integral could not be bounded."""


class InsufficientTail(MirrorSpecError, ValueError):
    """A spectrum series does not contain enough exponential tail to fit."""


class UsageError(MirrorSpecError, ValueError):
    """Invalid command-line flag, config key or config value."""


class CancellationWarning(RuntimeWarning):
    """Catastrophic cancellation could not be ruled out."""


class ValidityWarning(UserWarning):
    """Parameters lie outside the regime where a formula is expected to hold."""
