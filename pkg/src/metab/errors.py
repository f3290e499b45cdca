"""Shared exception types."""


class BudgetError(RuntimeError):
    """An enumeration or search would exceed its configured budget."""


class InvariantViolation(AssertionError):
    """A structural fact the finite-level theory guarantees failed to hold.

    Raised (never caught internally) so that pipelines surface counterexamples
    instead of silently producing reports built on a falsified premise.
    """


class HypothesisError(ValueError):
    """Input data violates a stated precondition of an operation."""


class ParseError(ValueError):
    """Unparseable input, carrying the offending offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
