"""Error taxonomy shared by the library and the command line driver.

Every failure the library can signal maps onto one of the classes below; the
CLI translates the class to a stable exit code and a machine-readable record,
so scripted callers never have to parse prose.
"""

from __future__ import annotations


class CpqrError(Exception):
    """Base class for all library errors."""

    exit_code = 1

    def record(self) -> dict:
        """Machine-readable form used by the CLI on stderr."""
        return {"error": type(self).__name__, "message": str(self)}


class ConfigError(CpqrError):
    """Bad configuration: unknown unit/material tag, invalid model data."""

    exit_code = 2


class ValidationError(ConfigError):
    """Model data failed a physical sanity check (e.g. tabulated eps(0) < 1)."""


class DomainError(CpqrError):
    """Argument outside the mathematical/physical domain of an operation."""

    exit_code = 3


class ExtrapolationError(DomainError):
    """Tabulated model queried outside its grid."""


class CoverageError(DomainError):
    """A supplied grid does not bracket the feature being sought."""


class AccuracyError(CpqrError):
    """A numerical accuracy target was not met.

    Carries the achieved error estimate so callers can decide whether the
    degraded result is still usable.
    """

    exit_code = 4

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved

    def record(self) -> dict:
        rec = super().record()
        if self.achieved is not None:
            rec["achieved"] = self.achieved
        return rec


class TableBuildError(AccuracyError):
    """A freshly built potential table failed its validation invariants."""


class AsymptoticsError(AccuracyError):
    """Amplitude integration ran out of grid before reaching flatness."""


class SamplingError(AccuracyError):
    """A sampled curve is too coarse to be trusted (e.g. phase branch jump)."""


class CacheError(CpqrError):
    """Table cache I/O failed or a cache entry is corrupt."""

    exit_code = 5
