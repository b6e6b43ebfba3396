class DomainError(ValueError):
    """Input outside an operation's domain."""


class NotFoundWithinBound(LookupError):
    """A bounded witness search finished without a hit."""


class InvariantViolation(AssertionError):
    """An internal cross-check disagreed with the main computation."""


class Indeterminate(ArithmeticError):
    """A floating-point decision fell inside its tolerance band."""


class SaturationFailed(RuntimeError):
    """The maximal-order enlargement loop could not reach the discriminant."""
