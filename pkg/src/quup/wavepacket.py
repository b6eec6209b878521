"""Time-dependent Gaussian wave packets for the double slit.

Two non-spreading packets of width ``sigma0`` start on their slits at ``t = 0``
and travel ``s1`` and ``s2`` to the detector at ``s = 0``.  Integrating the
probability current at the detector over time gives the detection
probability, which for long packets reduces to the steady-beam result up to
a global normalisation.

Packet wave number is ``k0 = p0/hbar`` so that ``v_g = hbar k0 / m = p0/m``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._hyper import sech
from .core import BeamParticle
from .errors import DomainError
from .quadrature import integrate

__all__ = [
    "PacketParams",
    "TwoPathPacketSetup",
    "PacketValidity",
    "DetectionProbability",
    "make_packet",
    "packet_value",
    "current_single",
    "current_single_from_derivative",
    "current_cross",
    "total_current",
    "total_current_from_amplitudes",
    "detection_probability_numeric",
    "detection_probability_analytic",
    "detection_probability_long_coherence",
    "total_visibility",
]

# Gaussian window half-width (in sigma0/v_g) used to seed quadrature panels
_WINDOW = 8.0
# upper integration limit sits this many sigma0/v_g past the last arrival
_TAIL = 12.0
# lower-limit tail integral spans this many sigma0/v_g below t = 0
_NEG_TAIL = 40.0


@dataclass(frozen=True)
class PacketParams:
    sigma0: float
    k0: float
    omega0: float
    gamma: float
    v_g: float
    hbar_over_m: float
    N0: float = 1.0

    def __post_init__(self):
        if not (self.sigma0 > 0 and math.isfinite(self.sigma0)):
            raise DomainError(f"sigma0 must be finite and > 0, got {self.sigma0!r}")
        if self.gamma < 0:
            raise DomainError("gamma must be >= 0")

    @property
    def sigma_k(self) -> float:
        return 0.5 / self.sigma0

    @property
    def t_spread(self) -> float:
        return 2.0 * self.sigma0 ** 2 / self.hbar_over_m

    @property
    def coherence_length(self) -> float:
        return self.sigma0

    @property
    def norm(self) -> float:
        """Peak current prefactor ``(2 pi sigma0^2)^(-1/2)``."""
        return 1.0 / (self.sigma0 * math.sqrt(2.0 * math.pi))


def make_packet(b: BeamParticle, sigma0: float, N0: float = 1.0) -> PacketParams:
    k0 = b.p0 / b.hbar
    hbar_over_m = b.hbar / b.mass
    return PacketParams(
        sigma0=sigma0,
        k0=k0,
        omega0=0.5 * hbar_over_m * k0 * k0,
        gamma=b.gamma,
        v_g=b.v_g,
        hbar_over_m=hbar_over_m,
        N0=N0,
    )


class PacketValidity(NamedTuple):
    path_over_width: float          # min(s1, s2) / sigma0, want >> 1
    decay_per_width: float          # gamma sigma0 / v_g, want << 1
    spread_margin: float            # sigma0 / sqrt(hbar L / 2 p0), want >> 1
    ok: bool


@dataclass(frozen=True)
class TwoPathPacketSetup:
    s1: float
    s2: float
    packet: PacketParams

    def __post_init__(self):
        if not (self.s1 > 0 and self.s2 > 0):
            raise DomainError(f"path lengths must be > 0, got {self.s1}, {self.s2}")

    @property
    def delta_s(self) -> float:
        return self.s1 - self.s2

    def validity(self, min_path_over_width: float = 30.0, max_decay_per_width: float = 1e-3,
                 min_spread_margin: float = 10.0) -> PacketValidity:
        p = self.packet
        path = min(self.s1, self.s2) / p.sigma0
        decay = p.gamma * p.sigma0 / p.v_g
        # hbar L / 2 p0 = (hbar/m) L / (2 v_g)
        spread = p.sigma0 / math.sqrt(p.hbar_over_m * max(self.s1, self.s2) / (2.0 * p.v_g))
        ok = path >= min_path_over_width and decay <= max_decay_per_width and spread >= min_spread_margin
        return PacketValidity(path, decay, spread, ok)


def packet_value(p: PacketParams, s_i: float, s: float, t: float) -> complex:
    """Packet launched from ``s = -s_i`` at ``t = 0``, evaluated at ``(s, t)``."""
    if t < 0:
        raise DomainError("t must be >= 0")
    amp = (2.0 * math.pi * p.sigma0 ** 2) ** -0.25
    x = s + s_i - p.v_g * t
    envelope = math.exp(-x * x / (4.0 * p.sigma0 ** 2) - 0.5 * p.gamma * t)
    return amp * envelope * cmath.exp(1j * (p.k0 * (s + s_i) - p.omega0 * t))


def _packet_gradient(p: PacketParams, s_i: float, s: float, t: float) -> complex:
    x = s + s_i - p.v_g * t
    return (1j * p.k0 - x / (2.0 * p.sigma0 ** 2)) * packet_value(p, s_i, s, t)


def current_single(p: PacketParams, s_i, t):
    """``J_i(0, t) = v_g |psi_i(0, t)|^2``; vectorised over ``t``."""
    t = np.asarray(t, dtype=float)
    x = s_i - p.v_g * t
    out = p.v_g * p.norm * np.exp(-x * x / (2.0 * p.sigma0 ** 2) - p.gamma * t)
    return float(out) if out.ndim == 0 else out


def current_single_from_derivative(p: PacketParams, s_i: float, t: float) -> float:
    """Current from ``(hbar/m) Im[psi* dpsi/ds]`` at ``s = 0``."""
    psi = packet_value(p, s_i, 0.0, t)
    return p.hbar_over_m * (psi.conjugate() * _packet_gradient(p, s_i, 0.0, t)).imag


def current_cross(setup: TwoPathPacketSetup, t):
    """Interference current ``2 v_g Re[psi_1* psi_2]`` at the detector; vectorised."""
    p = setup.packet
    t = np.asarray(t, dtype=float)
    x1 = setup.s1 - p.v_g * t
    x2 = setup.s2 - p.v_g * t
    cos_term = math.cos(p.k0 * (setup.s1 - setup.s2))
    out = 2.0 * p.v_g * p.norm * cos_term * np.exp(
        -(x1 * x1 + x2 * x2) / (4.0 * p.sigma0 ** 2) - p.gamma * t)
    return float(out) if out.ndim == 0 else out


def total_current(setup: TwoPathPacketSetup, t):
    p = setup.packet
    return p.N0 * (current_single(p, setup.s1, t) + current_single(p, setup.s2, t)
                   + current_cross(setup, t))


def total_current_from_amplitudes(setup: TwoPathPacketSetup, t: float) -> float:
    """``N0 v_g |psi_1(0,t) + psi_2(0,t)|^2`` straight from the packet values."""
    p = setup.packet
    psi = packet_value(p, setup.s1, 0.0, t) + packet_value(p, setup.s2, 0.0, t)
    return p.N0 * p.v_g * abs(psi) ** 2


class DetectionProbability(NamedTuple):
    P1: float
    P2: float
    P12: float
    P_total: float
    error_estimate: float = 0.0
    lower_limit_discrepancy: tuple = (0.0, 0.0, 0.0)
    validity: PacketValidity | None = None


def _arrival(p: PacketParams, s: float) -> float:
    return s / p.v_g


def _breakpoints(p: PacketParams, centre: float, t_max: float):
    w = p.sigma0 / p.v_g
    lo = max(0.0, centre - _WINDOW * w)
    hi = min(t_max, centre + _WINDOW * w)
    pts = [0.0, t_max]
    if hi > lo:
        pts.extend(np.linspace(lo, hi, 17).tolist())
    return pts


def _integrate_component(func, p, centre, t_max, rel_tol):
    main = integrate(func, _breakpoints(p, centre, t_max), rel_tol=rel_tol)
    w = p.sigma0 / p.v_g
    neg = integrate(func, [-_NEG_TAIL * w, 0.0], rel_tol=rel_tol)
    return main, neg


def detection_probability_numeric(setup: TwoPathPacketSetup, rel_tol: float = 1e-9) -> DetectionProbability:
    """Time-integrated detection probability by adaptive quadrature from ``t = 0``.

    Integration runs over ``[0, T_max]`` with ``T_max`` twelve packet widths
    past the later arrival; the truncated upper tail is below ``1e-31`` of the
    peak contribution.  ``lower_limit_discrepancy`` holds, per component, the
    integral over ``t < 0`` divided by the integral over ``t >= 0``: the size
    of the error made by extending the lower limit to minus infinity.
    """
    p = setup.packet
    w = p.sigma0 / p.v_g
    t_max = max(_arrival(p, setup.s1), _arrival(p, setup.s2)) + _TAIL * w
    t_mid = 0.5 * (_arrival(p, setup.s1) + _arrival(p, setup.s2))

    results = [
        _integrate_component(lambda t: current_single(p, setup.s1, t), p, _arrival(p, setup.s1), t_max, rel_tol),
        _integrate_component(lambda t: current_single(p, setup.s2, t), p, _arrival(p, setup.s2), t_max, rel_tol),
        _integrate_component(lambda t: current_cross(setup, t), p, t_mid, t_max, rel_tol),
    ]
    values = [p.N0 * main.value for main, _ in results]
    err = p.N0 * sum(main.error for main, _ in results)
    discrepancy = tuple(
        (neg.value / main.value) if main.value != 0 else 0.0 for main, neg in results)
    P1, P2, P12 = values
    return DetectionProbability(P1, P2, P12, P1 + P2 + P12, err, discrepancy, setup.validity())


def detection_probability_analytic(setup: TwoPathPacketSetup) -> DetectionProbability:
    """Closed forms obtained by extending the time integral to minus infinity."""
    p = setup.packet
    ds = setup.delta_s
    coherence = math.exp(-ds * ds / (8.0 * p.sigma0 ** 2))
    if p.gamma == 0:
        # stable particles: 2 N0 {1 + exp(-ds^2/8 sigma0^2) cos(k0 ds)}
        fringe = coherence * math.cos(p.k0 * ds)
        return DetectionProbability(p.N0, p.N0, 2.0 * p.N0 * fringe, 2.0 * p.N0 * (1.0 + fringe),
                                    validity=setup.validity())
    a1 = p.gamma * setup.s1 / p.v_g
    a2 = p.gamma * setup.s2 / p.v_g
    P1 = p.N0 * math.exp(-a1)
    P2 = p.N0 * math.exp(-a2)
    P12 = 2.0 * p.N0 * math.cos(p.k0 * ds) * coherence * math.exp(-0.5 * (a1 + a2))
    return DetectionProbability(P1, P2, P12, P1 + P2 + P12, validity=setup.validity())


def detection_probability_long_coherence(setup: TwoPathPacketSetup) -> float:
    """The ``sigma0 -> infinity`` limit of the analytic total."""
    p = setup.packet
    a1 = p.gamma * setup.s1 / p.v_g
    a2 = p.gamma * setup.s2 / p.v_g
    return p.N0 * (math.exp(-a1) + math.exp(-a2)
                   + 2.0 * math.exp(-0.5 * (a1 + a2)) * math.cos(p.k0 * setup.delta_s))


class TotalVisibility(NamedTuple):
    V_G: float
    V_DS: float
    V_tot: float


def total_visibility(b: BeamParticle, sigma0: float, delta_s: float) -> TotalVisibility:
    """Finite-coherence visibility times the decay visibility.

    ``sigma0 = math.inf`` selects the long-coherence limit.
    """
    if not sigma0 > 0:
        raise DomainError("sigma0 must be > 0")
    v_g = 1.0 if math.isinf(sigma0) else math.exp(-delta_s * delta_s / (8.0 * sigma0 * sigma0))
    v_ds = 1.0 if b.stable else sech(0.5 * delta_s * b.inv_ell0)
    return TotalVisibility(v_g, v_ds, v_g * v_ds)
