"""Exception types raised by monometric."""


class ValidationError(ValueError):
    """Input violates a structural invariant (Hermiticity, trace, shape, ...)."""


class DomainError(ValueError):
    """A scalar function is undefined or non-finite at a sampled point."""
