"""Stationary WKB amplitudes with a complex wave vector.

A leg of the unperturbed path picks up the complex phase

    phi = -(m / hbar p0) * (1 - i lambda0 / 2 ell0) * integral(V ds)

and the stationary amplitude at the end of a path of total length ``s`` is

    psi = prefactor * exp(i p0 s / hbar) * exp(-s / 2 ell0) * exp(i phi).

Only straight legs are supported.  The potential must vary slowly on the
scale of ``lambda0``; that is the caller's responsibility and is not checked.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import BeamParticle
from .errors import DataError, DomainError, GeometryError

__all__ = [
    "ZeroPotential",
    "UniformGravity",
    "SampledLineProfile",
    "PathLeg",
    "ComplexPhase",
    "PropagatedAmplitude",
    "leg_phase",
    "propagate",
    "CONTIGUITY_TOL",
]

CONTIGUITY_TOL = 1e-12


@dataclass(frozen=True)
class ZeroPotential:
    def line_integral(self, b, leg, s_offset=0.0) -> float:
        return 0.0


@dataclass(frozen=True)
class UniformGravity:
    """``V(r) = m g (z - z0)``, with ``m`` taken from the beam."""

    g: float
    z0: float = 0.0

    def line_integral(self, b, leg, s_offset=0.0) -> float:
        z_mid = 0.5 * (leg.start[2] + leg.end[2])
        return b.mass * self.g * (z_mid - self.z0) * leg.length


@dataclass(frozen=True)
class SampledLineProfile:
    """Potential energy (J) sampled against arc length ``s`` (m) along a path.

    ``s`` is measured from the start of the whole path, so a profile can be
    shared by consecutive legs.  Integration over a leg uses the trapezoidal
    rule on the samples inside the leg plus linearly interpolated endpoints.
    """

    s: tuple
    V: tuple

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        V = np.asarray(self.V, dtype=float)
        if s.ndim != 1 or s.shape != V.shape:
            raise DataError("s and V must be 1-D sequences of equal length")
        if s.size < 2:
            raise DataError("a sampled profile needs at least 2 samples")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(V))):
            raise DataError("profile samples must be finite")
        if np.any(np.diff(s) <= 0):
            raise DataError("profile abscissae must be strictly increasing")
        object.__setattr__(self, "s", tuple(s.tolist()))
        object.__setattr__(self, "V", tuple(V.tolist()))

    @classmethod
    def from_function(cls, func, s_max: float, n: int) -> "SampledLineProfile":
        s = np.linspace(0.0, s_max, n)
        return cls(tuple(s), tuple(func(s)))

    def line_integral(self, b, leg, s_offset=0.0) -> float:
        s = np.asarray(self.s)
        V = np.asarray(self.V)
        a, c = s_offset, s_offset + leg.length
        # tolerate round-off at the profile ends
        slack = 1e-12 * max(1.0, abs(s[-1]))
        if a < s[0] - slack or c > s[-1] + slack:
            raise DataError(f"leg spans s in [{a}, {c}] but profile covers [{s[0]}, {s[-1]}]")
        a, c = max(a, s[0]), min(c, s[-1])
        inside = (s > a) & (s < c)
        xs = np.concatenate(([a], s[inside], [c]))
        ys = np.interp(xs, s, V)
        return float(np.trapezoid(ys, xs))


PotentialModel = ZeroPotential | UniformGravity | SampledLineProfile


@dataclass(frozen=True)
class PathLeg:
    start: tuple
    end: tuple
    length: float = field(init=False)

    def __post_init__(self):
        start = tuple(float(x) for x in self.start)
        end = tuple(float(x) for x in self.end)
        if len(start) != 3 or len(end) != 3:
            raise GeometryError("leg endpoints must be 3-vectors")
        length = math.dist(start, end)
        if not length > 0:
            raise DomainError("leg has zero length")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)
        object.__setattr__(self, "length", length)


@dataclass(frozen=True)
class ComplexPhase:
    """Complex phase ``real_part + i*imag_part``; the amplitude factor is ``exp(i*phi)``."""

    real_part: float = 0.0
    imag_part: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.real_part) and math.isfinite(self.imag_part)):
            raise DataError(f"non-finite phase ({self.real_part}, {self.imag_part})")

    def __add__(self, other: "ComplexPhase") -> "ComplexPhase":
        return ComplexPhase(self.real_part + other.real_part, self.imag_part + other.imag_part)

    def __sub__(self, other: "ComplexPhase") -> "ComplexPhase":
        return ComplexPhase(self.real_part - other.real_part, self.imag_part - other.imag_part)

    def __complex__(self) -> complex:
        return complex(self.real_part, self.imag_part)

    def factor(self) -> complex:
        return cmath.exp(1j * complex(self))


def _decay_ratio(b: BeamParticle) -> float:
    # lambda0 / (2 ell0), exactly zero for stable beams
    return 0.5 * b.lambda0 * b.inv_ell0


def leg_phase(b: BeamParticle, leg: PathLeg, pot, s_offset: float = 0.0) -> ComplexPhase:
    """Complex potential phase accumulated along one straight leg."""
    integral = pot.line_integral(b, leg, s_offset)
    if not math.isfinite(integral):
        raise DataError("potential line integral is not finite")
    scale = b.mass / (b.hbar * b.p0)
    real = -scale * integral
    return ComplexPhase(real, -_decay_ratio(b) * real)


@dataclass(frozen=True)
class PropagatedAmplitude:
    prefactor: complex
    length: float
    dynamical_phase: float
    attenuation_exponent: float
    potential_phase: ComplexPhase

    @property
    def amplitude(self) -> complex:
        phi = complex(self.potential_phase)
        return self.prefactor * cmath.exp(
            1j * self.dynamical_phase - self.attenuation_exponent + 1j * phi)

    @property
    def probability(self) -> float:
        """``|amplitude|**2`` assembled from moduli, without phase round-off."""
        return (abs(self.prefactor) ** 2
                * math.exp(-2.0 * self.attenuation_exponent)
                * math.exp(-2.0 * self.potential_phase.imag_part))


def propagate(b: BeamParticle, legs: Sequence[PathLeg], pot=ZeroPotential(),
              prefactor: complex = 1.0) -> PropagatedAmplitude:
    """Stationary amplitude at the end of a piecewise-straight path."""
    if not legs:
        raise GeometryError("a path needs at least one leg")
    for prev, nxt in zip(legs, legs[1:]):
        if math.dist(prev.end, nxt.start) > CONTIGUITY_TOL:
            raise GeometryError(f"legs are not contiguous: {prev.end} -> {nxt.start}")
    total = ComplexPhase()
    s = 0.0
    for leg in legs:
        total = total + leg_phase(b, leg, pot, s_offset=s)
        s += leg.length
    return PropagatedAmplitude(
        prefactor=complex(prefactor),
        length=s,
        dynamical_phase=b.p0 * s / b.hbar,
        attenuation_exponent=0.5 * s * b.inv_ell0,
        potential_phase=total,
    )
