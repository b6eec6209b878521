"""Physical constants, beam parameters and validity checks.

All quantities are SI.  The reduced de Broglie wavelength ``lambda0 = hbar/p0``
is used throughout, so ``k0 ~ 1/lambda0`` and cosine arguments read
``delta_s / lambda0`` without a factor of 2*pi.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

from .errors import DataError, DomainError

__all__ = [
    "PhysicalConstants",
    "DEFAULT_CONSTANTS",
    "CONSTANTS_TABLE",
    "NEUTRON_LIFETIME_S",
    "THERMAL_NEUTRON_SPEED",
    "BeamParticle",
    "ValidityReport",
    "make_beam",
    "neutron_beam",
    "check_validity",
    "load_constants",
]


# Single source of truth for the default constants set.
# name: (value, unit, note)
CONSTANTS_TABLE = {
    "hbar": (1.054571817e-34, "J s", "CODATA 2018, exact by SI definition"),
    "c": (2.99792458e8, "m/s", "exact by SI definition"),
    "g_std": (9.80, "m/s^2", "rounded local value"),
    "m_neutron": (1.67492749804e-27, "kg", "CODATA 2018"),
}

NEUTRON_LIFETIME_S = 879.4
THERMAL_NEUTRON_SPEED = 2200.0


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = CONSTANTS_TABLE["hbar"][0]
    c: float = CONSTANTS_TABLE["c"][0]
    g_std: float = CONSTANTS_TABLE["g_std"][0]
    m_neutron: float = CONSTANTS_TABLE["m_neutron"][0]

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"constant {name} must be finite and > 0, got {value!r}")

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_CONSTANTS = PhysicalConstants()


def load_constants(path) -> PhysicalConstants:
    """Read a constants set from a JSON object with keys hbar, c, g_std, m_neutron.

    Missing keys fall back to the defaults; unknown keys are rejected.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise DataError(f"{path}: expected a JSON object")
    unknown = set(data) - set(CONSTANTS_TABLE)
    if unknown:
        raise DataError(f"{path}: unknown constants {sorted(unknown)}")
    return PhysicalConstants(**{k: float(v) for k, v in data.items()})


@dataclass(frozen=True)
class BeamParticle:
    """A monoenergetic beam of (possibly unstable) particles.

    Built by :func:`make_beam`; the derived fields are filled in there and
    should not be passed by hand.

    Attributes
    ----------
    mass, p0, gamma
        Mass (kg), momentum (kg m/s) and decay rate (1/s).
    stable
        True iff ``gamma == 0``.  Stable beams have ``ell0 == inf`` and
        ``kappa0 == 0`` exactly; code that needs the decay length should use
        ``inv_ell0`` which is exactly zero for them.
    k0, kappa0
        Real and imaginary parts of the complex wave number, from the exact
        quadratic relation ``k0**2 = (p0/hbar)**2 + kappa0**2`` with
        ``kappa0 = m*gamma / (2*hbar*k0)``.
    lambda0
        Reduced wavelength ``hbar/p0``.
    ell0, inv_ell0
        Mean survival length ``p0/(m*gamma)`` and its inverse.
    """

    mass: float
    p0: float
    gamma: float
    constants: PhysicalConstants = DEFAULT_CONSTANTS
    stable: bool = field(default=False)
    v_g: float = field(default=0.0)
    lambda0: float = field(default=0.0)
    ell0: float = field(default=math.inf)
    inv_ell0: float = field(default=0.0)
    k0: float = field(default=0.0)
    kappa0: float = field(default=0.0)
    rest_energy: float = field(default=0.0)
    kinetic_energy: float = field(default=0.0)
    tau: float = field(default=math.inf)

    @property
    def hbar(self) -> float:
        return self.constants.hbar


def make_beam(m: float, p0: float, gamma: float = 0.0,
              constants: PhysicalConstants = DEFAULT_CONSTANTS) -> BeamParticle:
    """Derive every beam scale from mass, momentum and decay rate."""
    for name, value in (("mass", m), ("p0", p0), ("gamma", gamma)):
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value!r}")
    if m <= 0:
        raise DomainError(f"mass must be > 0, got {m!r}")
    if p0 <= 0:
        raise DomainError(f"p0 must be > 0, got {p0!r}")
    if gamma < 0:
        raise DomainError(f"gamma must be >= 0, got {gamma!r}")

    hbar = constants.hbar
    stable = gamma == 0
    k_free = p0 / hbar
    if stable:
        k0 = k_free
        kappa0 = 0.0
        ell0 = math.inf
        inv_ell0 = 0.0
        tau = math.inf
    else:
        # k0^4 - k_free^2 k0^2 - (m gamma / 2 hbar)^2 = 0, positive root in k0^2.
        b = m * gamma / (2.0 * hbar)
        # (a + sqrt(a^2 + 4 b^2)) / 2 with a = k_free^2, written to avoid overflow
        ratio = b / (k_free * k_free)
        k0 = k_free * math.sqrt(0.5 * (1.0 + math.sqrt(1.0 + 4.0 * ratio * ratio)))
        kappa0 = b / k0
        ell0 = p0 / (m * gamma)
        inv_ell0 = m * gamma / p0
        tau = 1.0 / gamma

    return BeamParticle(
        mass=m,
        p0=p0,
        gamma=gamma,
        constants=constants,
        stable=stable,
        v_g=p0 / m,
        lambda0=hbar / p0,
        ell0=ell0,
        inv_ell0=inv_ell0,
        k0=k0,
        kappa0=kappa0,
        rest_energy=m * constants.c ** 2,
        kinetic_energy=p0 * p0 / (2.0 * m),
        tau=tau,
    )


def neutron_beam(speed: float = THERMAL_NEUTRON_SPEED, lifetime: float | None = NEUTRON_LIFETIME_S,
                 constants: PhysicalConstants = DEFAULT_CONSTANTS) -> BeamParticle:
    """Neutron beam at ``speed`` m/s; ``lifetime=None`` gives a stable neutron."""
    m = constants.m_neutron
    gamma = 0.0 if lifetime is None else 1.0 / lifetime
    return make_beam(m, m * speed, gamma, constants)


@dataclass(frozen=True)
class ValidityReport:
    kinetic_over_rest: float
    width_over_kinetic: float
    kappa_over_k: float
    threshold: float

    @property
    def ok(self) -> bool:
        return (self.kinetic_over_rest <= self.threshold
                and self.width_over_kinetic <= self.threshold)


def check_validity(b: BeamParticle, threshold: float = 1e-3) -> ValidityReport:
    """Check the energy hierarchy ``m c^2 >> p0^2/2m >> hbar*gamma``.

    Always returns a report; callers decide what to do with a failure.
    """
    return ValidityReport(
        kinetic_over_rest=b.kinetic_energy / b.rest_energy,
        width_over_kinetic=b.hbar * b.gamma / b.kinetic_energy,
        kappa_over_k=b.kappa0 / b.k0,
        threshold=threshold,
    )
