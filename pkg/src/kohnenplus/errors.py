"""Exception types shared across the package."""


class KohnenPlusError(Exception):
    """Base class for all package errors."""


class TruncationError(KohnenPlusError):
    """A series is too short for the requested operation."""


class DimensionMismatchError(KohnenPlusError):
    """A computed space dimension disagrees with its theoretical value."""


class DiagonalizationError(KohnenPlusError):
    """Simultaneous diagonalization of Hecke operators failed."""


class NoLiftMatchError(KohnenPlusError):
    """A plus-space eigenform matched no integral-weight eigenform."""


class BudgetExceededError(KohnenPlusError):
    """A numerical routine hit its term/node budget before converging."""


class CoefficientShortageError(KohnenPlusError):
    """A coefficient table is shorter than an adaptive truncation needs."""


class IllConditionedError(KohnenPlusError):
    """A linear system for harmonic weights is numerically singular."""


class InconclusiveSignError(KohnenPlusError):
    """A certified sign evaluation could not beat its tail budget."""

    def __init__(self, message, value=None, tail=None):
        super().__init__(message)
        self.value = value
        self.tail = tail


class NoSignChangeError(KohnenPlusError):
    """Bracketing endpoints carry the same certified sign."""


class VerificationError(KohnenPlusError):
    """An exact identity that must hold failed to verify."""


class CacheCorruptError(KohnenPlusError):
    """A cache entry failed its checksum or could not be decoded."""
