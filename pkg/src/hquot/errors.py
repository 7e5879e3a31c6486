"""Exception hierarchy shared by the library and the CLI."""
from __future__ import annotations


class HquotError(Exception):
    """Base class for every error raised by this package."""


class ModulusRangeError(HquotError, ValueError):
    """Modulus outside the supported window 2 <= m < 2**104."""


class NotInvertible(HquotError, ArithmeticError):
    def __init__(self, value: int, modulus: int, index: int | None = None):
        self.value = value
        self.modulus = modulus
        self.index = index
        where = f" at index {index}" if index is not None else ""
        super().__init__(f"{value} is not invertible mod {modulus}{where}")


class RangeTooLarge(HquotError, ValueError):
    """Sieve bound above the supported ceiling."""


class NotPrime(HquotError, ValueError):
    pass


class InvalidPrime(HquotError, ValueError):
    """Prime too small for the requested quotient formula."""


class VacuousSum(HquotError, ValueError):
    """p <= N, so floor(p/N) is zero and the harmonic sum is empty."""


class BaseNotCoprime(HquotError, ValueError):
    pass


class QuotientOverflow(HquotError, OverflowError):
    """A base power or its square modulus does not fit in the 2**104 window."""


class MethodUnavailable(HquotError, ValueError):
    """Quotient methods only exist for N = 6."""


class CeilingExceeded(HquotError, ValueError):
    pass


class CheckpointError(HquotError):
    pass


class CheckpointCorrupt(CheckpointError):
    pass


class CheckpointMismatch(CheckpointError):
    pass


class CheckpointIOError(CheckpointError, OSError):
    pass


class VerificationMismatch(HquotError, AssertionError):
    """A candidate zero failed re-verification by an independent method."""
