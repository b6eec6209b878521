"""Interference of undecayed unstable particles in double-slit and COW interferometers."""

from .core import (
    DEFAULT_CONSTANTS,
    BeamParticle,
    PhysicalConstants,
    check_validity,
    make_beam,
    neutron_beam,
)
from .duality import DualityResult, duality_check, predictability_from_probs, visibility_from_extrema
from .errors import (
    ConfigError,
    DataError,
    DomainError,
    GeometryError,
    NumericError,
    QuupError,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONSTANTS",
    "BeamParticle",
    "PhysicalConstants",
    "check_validity",
    "make_beam",
    "neutron_beam",
    "DualityResult",
    "duality_check",
    "predictability_from_probs",
    "visibility_from_extrema",
    "ConfigError",
    "DataError",
    "DomainError",
    "GeometryError",
    "NumericError",
    "QuupError",
    "__version__",
]
