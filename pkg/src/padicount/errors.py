"""Exception types raised across the package.

Every error carries a short machine-readable ``code`` so that experiment
rows can record *why* a run was skipped without parsing messages.
"""

from __future__ import annotations


class PadicountError(ValueError):
    code = "ERROR"

    def __init__(self, message: str = "", **context):
        super().__init__(message or self.code)
        self.context = context


class NotPrime(PadicountError):
    code = "NOT_PRIME"


class NotIntegral(PadicountError):
    code = "NOT_INTEGRAL"


class PDividesDenominator(NotIntegral):
    """A reduced fraction whose denominator is divisible by p (so it is not in Z_p)."""

    code = "P_DIVIDES_DENOMINATOR"


class InsufficientPrecision(PadicountError):
    code = "INSUFFICIENT_PRECISION"


class InfeasibleSize(PadicountError):
    code = "INFEASIBLE_SIZE"


class ThresholdNonpositive(PadicountError):
    code = "THRESHOLD_NONPOSITIVE"


class NoOverfullBucket(PadicountError):
    code = "NO_OVERFULL_BUCKET"


class OutOfRange(PadicountError):
    code = "OUT_OF_RANGE"


class ConstraintViolation(PadicountError):
    code = "CONSTRAINT_VIOLATION"
