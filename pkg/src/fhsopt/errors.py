"""Exception hierarchy shared by all fhsopt modules."""

from __future__ import annotations


class FhsError(Exception):
    """Base class for library errors."""


class FieldError(FhsError, ValueError):
    """Invalid field parameters or field-element misuse."""


class NotIrreducibleError(FieldError):
    pass


class NotPrimitiveError(FieldError):
    """The modulus is irreducible but its root does not generate the unit group."""

    def __init__(self, message: str, order: int):
        super().__init__(message)
        self.order = order


class HypothesisError(FhsError, ValueError):
    """A construction precondition does not hold.

    ``hypothesis`` names the violated condition so callers (and the CLI)
    can report it verbatim.
    """

    def __init__(self, hypothesis: str, detail: str = ""):
        msg = hypothesis if not detail else f"{hypothesis}: {detail}"
        super().__init__(msg)
        self.hypothesis = hypothesis


class VerificationError(FhsError):
    """A brute-force verification found a counterexample."""


class BudgetError(FhsError):
    """The requested computation exceeds the configured work budget."""
