"""Casimir-Polder potentials and quantum reflection of antihydrogen.

The package computes the attractive Casimir-Polder interaction between a
ground-state (anti)hydrogen atom and a plane mirror -- ideal, silicon or
silica, bulk or thin slab -- and propagates slow atoms through it to obtain
quantum reflection probabilities, scattering lengths and the lifetime of the
gravitational bouncer those numbers imply.
"""

__version__ = "0.1.0"

from .errors import (
    AccuracyError,
    AsymptoticsError,
    CacheError,
    ConfigError,
    CoverageError,
    CpqrError,
    DomainError,
    ExtrapolationError,
    SamplingError,
    TableBuildError,
    ValidationError,
)
from .units import Constants, DEFAULT_CONSTANTS

__all__ = [
    "__version__",
    "Constants",
    "DEFAULT_CONSTANTS",
    "CpqrError",
    "ConfigError",
    "ValidationError",
    "DomainError",
    "ExtrapolationError",
    "CoverageError",
    "AccuracyError",
    "TableBuildError",
    "AsymptoticsError",
    "SamplingError",
    "CacheError",
]
