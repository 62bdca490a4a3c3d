"""
Exception hierarchy for cfkit

Every error raised by the library derives from CFKitError, so callers (and
the CLI) can separate input problems from verification outcomes.
"""

from typing import Optional


class CFKitError(ValueError):
    """Base class of all cfkit errors."""


# Arithmetic

class MixedFieldError(CFKitError):
    """Operands live in distinct quadratic fields."""


class DivisionByZeroError(CFKitError):
    pass


class RationalRootsError(CFKitError):
    """Discriminant is a perfect square."""


class NegativeDiscriminantError(CFKitError):
    pass


# Words and matrices

class NotAPrefixError(CFKitError):
    pass


class NodeMismatchError(CFKitError):
    """Product of two arrows whose nodes do not match."""


class NotComposableError(CFKitError):
    pass


class IdentityMatrixError(CFKitError):
    pass


# Input

class ParseError(CFKitError):
    pass


class ValidationError(CFKitError):
    """Well-formed input that violates a structural requirement."""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class NotInIntervalError(CFKitError):
    pass


class OutOfRangeError(CFKitError):
    pass


class BadDiscriminantError(CFKitError):
    pass


# Dynamics

class NotInAttractorError(CFKitError):
    pass


class RationalPointError(CFKitError):
    pass


class StepBudgetExceededError(CFKitError):
    pass


class NoReturnError(CFKitError):
    pass


class NotIrreducibleError(CFKitError):
    pass


# Attractors

class WitnessNotParabolicError(CFKitError):
    pass


class ChainBrokenError(CFKitError):
    pass


class NonTerminationError(CFKitError):
    pass


# Transducer

class AllTokensDiedError(CFKitError):
    pass


class CycleNotFoundError(CFKitError):
    pass


class InvariantViolation(AssertionError):
    """A property guaranteed by the theory failed at runtime."""
