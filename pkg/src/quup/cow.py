"""COW gravity interferometer observables for undecayed unstable particles.

Geometry: a loop of length ``L0`` and height ``H0`` in a plane tilted by
``alpha`` about the horizontal axis along the lower leg AB.  Path ABD runs
along the axis then up; path ACD goes up first then along the upper leg CD,
which sits at height ``H0 sin(alpha)``.  In ``V = m g z`` the upper leg has
lower momentum, which shifts both the phase and the survival length:

    q_cow  = m^2 g H0 L0 / (hbar p0)
    q_ucow = m^3 g gamma H0 L0 / (2 p0^3)

The leg phases from :func:`leg_phases` are written out in closed form,
including the small ``hbar*gamma/(2 m c^2)`` contributions.  They drop out of
every observable here to relative order ``(v/c)^2``; ``q_ucow`` excludes them.
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._hyper import sech
from .core import BeamParticle, PhysicalConstants
from .errors import DomainError, GeometryError
from .propagator import ComplexPhase, PathLeg, UniformGravity, leg_phase

__all__ = [
    "CowGeometry",
    "BeamSplitterSet",
    "BALANCED_SPLITTER",
    "CowPhases",
    "CowRow",
    "leg_phases",
    "phases_from_q",
    "propagated_leg_phases",
    "q_factors",
    "detector1_probability",
    "detector1_probability_amplitude",
    "detector2_probability",
    "detector2_probability_amplitude",
    "intensity",
    "visibility",
    "predictability",
    "predictability_from_paths",
    "survival",
    "loop_legs",
    "rotation_scan",
    "rotation_scan_q",
    "upper_leg_momentum",
    "upper_leg_survival_length",
    "equivalent_path_difference",
    "STANDARD_LOOP",
]

_UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class CowGeometry:
    H0: float
    L0: float
    alpha: float = 0.0

    def __post_init__(self):
        if not (self.H0 > 0 and self.L0 > 0):
            raise GeometryError(f"H0 and L0 must be > 0, got {self.H0}, {self.L0}")
        if not (-math.pi / 2 <= self.alpha <= math.pi / 2):
            raise GeometryError(f"alpha must lie in [-pi/2, pi/2], got {self.alpha}")

    @property
    def aspect(self) -> float:
        return self.H0 / self.L0

    def tilted(self, alpha: float) -> "CowGeometry":
        return CowGeometry(self.H0, self.L0, alpha)


# 10 cm square loop turned to the vertical, the usual estimate case
STANDARD_LOOP = CowGeometry(0.1, 0.1, math.pi / 2)


@dataclass(frozen=True)
class BeamSplitterSet:
    R_M: complex = 1.0
    R_BS: complex = 1j / math.sqrt(2.0)
    T_BS: complex = 1.0 / math.sqrt(2.0)

    def __post_init__(self):
        rm, r, t = complex(self.R_M), complex(self.R_BS), complex(self.T_BS)
        if abs(abs(rm) ** 2 - 1.0) > _UNITARITY_TOL:
            raise DomainError(f"|R_M|^2 = {abs(rm) ** 2} != 1")
        if abs(abs(r) ** 2 + abs(t) ** 2 - 1.0) > _UNITARITY_TOL:
            raise DomainError(f"|R_BS|^2 + |T_BS|^2 = {abs(r) ** 2 + abs(t) ** 2} != 1")
        cross = r * t.conjugate() + r.conjugate() * t
        if abs(cross) > _UNITARITY_TOL:
            raise DomainError(f"R T* + R* T = {cross} != 0")
        object.__setattr__(self, "R_M", rm)
        object.__setattr__(self, "R_BS", r)
        object.__setattr__(self, "T_BS", t)


BALANCED_SPLITTER = BeamSplitterSet()


@dataclass(frozen=True)
class CowPhases:
    """Complex potential phases of both paths plus the derived COW quantities.

    ``aspect`` is ``H0/L0``; the closed-form detector probabilities need it
    for the individual path attenuations.
    """

    phi_ABD: ComplexPhase
    phi_ACD: ComplexPhase
    q_cow: float
    q_ucow: float
    sin_alpha: float
    aspect: float

    @property
    def delta_phi_cow(self) -> float:
        return -self.q_cow * self.sin_alpha

    @property
    def delta_phi_ucow(self) -> float:
        return self.q_ucow * self.sin_alpha

    @property
    def delta_phi(self) -> ComplexPhase:
        return self.phi_ACD - self.phi_ABD


def q_factors(b: BeamParticle, geo: CowGeometry, g: float | None = None) -> tuple[float, float]:
    """``(q_cow, q_ucow)`` for a beam and loop."""
    g = b.constants.g_std if g is None else g
    m, p0 = b.mass, b.p0
    area = geo.H0 * geo.L0
    q_cow = m * m * g * area / (b.hbar * p0)
    q_ucow = m ** 3 * g * b.gamma * area / (2.0 * p0 ** 3)
    return q_cow, q_ucow


def leg_phases(b: BeamParticle, geo: CowGeometry, constants: PhysicalConstants | None = None) -> CowPhases:
    """Closed-form leg phases of both paths.

    The vertical legs AC and BD carry identical phases; their real part is
    taken with ``sin(alpha)**2`` exactly as in the closed form this follows,
    although a direct line integral gives ``sin(alpha)`` (see
    :func:`propagated_leg_phases`).  Only the difference between the two paths
    enters any observable, and there the vertical legs cancel.
    """
    const = b.constants if constants is None else constants
    g, c, hbar = const.g_std, const.c, const.hbar
    m, p0, gamma = b.mass, b.p0, b.gamma
    H0, L0 = geo.H0, geo.L0
    sa = math.sin(geo.alpha)

    vert_re = -(m * m * g * H0 * H0) / (2.0 * hbar * p0) * sa * sa
    vert_im = (m ** 3 * g * H0 * H0 * gamma / (4.0 * p0 ** 3)
               + m * g * H0 * H0 * gamma / (4.0 * p0 * c * c)) * sa
    phi_vertical = ComplexPhase(vert_re, vert_im)

    upper = ComplexPhase(
        -(m * m * g * H0 * L0 * sa) / (hbar * p0),
        (m ** 3 * g * gamma / (2.0 * p0 ** 3) + m * g * gamma / (2.0 * p0 * c * c)) * H0 * L0 * sa,
    )
    q_cow = m * m * g * H0 * L0 / (hbar * p0)
    q_ucow = m ** 3 * g * gamma * H0 * L0 / (2.0 * p0 ** 3)
    return CowPhases(
        phi_ABD=phi_vertical,          # AB lies on z = 0 and contributes nothing
        phi_ACD=phi_vertical + upper,
        q_cow=q_cow,
        q_ucow=q_ucow,
        sin_alpha=sa,
        aspect=geo.aspect,
    )


def loop_legs(geo: CowGeometry):
    """Straight legs ``(AB, BD)`` and ``(AC, CD)`` of the tilted loop.

    The rotation axis is y; AB runs along it, AC rises in the tilted plane.
    """
    ca, sa = math.cos(geo.alpha), math.sin(geo.alpha)
    A = (0.0, 0.0, 0.0)
    B = (0.0, geo.L0, 0.0)
    C = (geo.H0 * ca, 0.0, geo.H0 * sa)
    D = (geo.H0 * ca, geo.L0, geo.H0 * sa)
    return (PathLeg(A, B), PathLeg(B, D)), (PathLeg(A, C), PathLeg(C, D))


def propagated_leg_phases(b: BeamParticle, geo: CowGeometry, g: float | None = None) -> CowPhases:
    """Leg phases from the generic line-integral propagator under ``V = m g z``."""
    g = b.constants.g_std if g is None else g
    pot = UniformGravity(g)
    (ab, bd), (ac, cd) = loop_legs(geo)
    q_cow, q_ucow = q_factors(b, geo, g)
    return CowPhases(
        phi_ABD=leg_phase(b, ab, pot) + leg_phase(b, bd, pot),
        phi_ACD=leg_phase(b, ac, pot) + leg_phase(b, cd, pot),
        q_cow=q_cow,
        q_ucow=q_ucow,
        sin_alpha=math.sin(geo.alpha),
        aspect=geo.aspect,
    )


def phases_from_q(q_cow: float, q_ucow: float, alpha: float, aspect: float = 1.0) -> CowPhases:
    """Dimensionless phases for a chosen ``(q_cow, q_ucow)``, independent of any beam.

    Imaginary parts follow the leading-order path attenuations
    ``q_ucow sin(alpha) * aspect/2`` (ABD) and ``q_ucow sin(alpha) * (1 + aspect/2)`` (ACD).
    """
    if q_cow < 0 or q_ucow < 0:
        raise DomainError("q_cow and q_ucow must be >= 0")
    if not aspect > 0:
        raise DomainError("aspect ratio H0/L0 must be > 0")
    sa = math.sin(alpha)
    phi_abd = ComplexPhase(0.0, q_ucow * sa * 0.5 * aspect)
    phi_acd = ComplexPhase(-q_cow * sa, q_ucow * sa * (1.0 + 0.5 * aspect))
    return CowPhases(phi_abd, phi_acd, q_cow, q_ucow, sa, aspect)


def survival(b: BeamParticle, geo: CowGeometry) -> float:
    return math.exp(-(geo.H0 + geo.L0) * b.inv_ell0)


def _intensity_fractions(bs: BeamSplitterSet):
    """``(|T|^2, |R|^2)``; exact halves for the balanced set, where 1/sqrt(2) is not."""
    if bs == BALANCED_SPLITTER:
        return 0.5, 0.5
    return abs(bs.T_BS) ** 2, abs(bs.R_BS) ** 2


def _p_d1_closed(ph: CowPhases, surv: float, bs: BeamSplitterSet) -> float:
    x = ph.q_ucow * ph.sin_alpha
    a = ph.aspect
    t2, r2 = _intensity_fractions(bs)
    weight = t2 * r2                                  # 1/4 for the balanced splitter
    return weight * surv * (
        math.exp(-2.0 * x * (1.0 + 0.5 * a))
        + math.exp(-2.0 * x * 0.5 * a)
        + 2.0 * math.exp(-x * (1.0 + a)) * math.cos(ph.q_cow * ph.sin_alpha)
    )


def _amplitude_sum(ph: CowPhases, surv: float, c_abd: complex, c_acd: complex,
                   dynamical_phase: float) -> float:
    common = cmath.exp(1j * dynamical_phase) * math.sqrt(surv)
    amp = common * (c_abd * ph.phi_ABD.factor() + c_acd * ph.phi_ACD.factor())
    return abs(amp) ** 2


def _p_d1_amplitude(ph, surv, bs, dynamical_phase=0.0):
    return _amplitude_sum(ph, surv, bs.T_BS * bs.R_M * bs.R_BS, bs.R_BS * bs.R_M * bs.T_BS,
                          dynamical_phase)


def _p_d2_amplitude(ph, surv, bs, dynamical_phase=0.0):
    return _amplitude_sum(ph, surv, bs.T_BS * bs.R_M * bs.T_BS, bs.R_BS * bs.R_M * bs.R_BS,
                          dynamical_phase)


def _p_d2_closed(ph, surv, bs):
    # splitter unitarity: D1 + D2 = |T|^2 P_ABD + |R|^2 P_ACD
    x = ph.q_ucow * ph.sin_alpha
    a = ph.aspect
    t2, r2 = _intensity_fractions(bs)
    total = surv * (t2 * math.exp(-2.0 * x * 0.5 * a) + r2 * math.exp(-2.0 * x * (1.0 + 0.5 * a)))
    return total - _p_d1_closed(ph, surv, bs)


def _resolve(target, geo):
    if isinstance(target, CowPhases):
        return target, 1.0
    if geo is None:
        raise DomainError("a CowGeometry is required with a BeamParticle")
    return leg_phases(target, geo), survival(target, geo)


def detector1_probability(target, geo: CowGeometry | None = None,
                          bs: BeamSplitterSet = BALANCED_SPLITTER, surv: float | None = None) -> float:
    """Probability that an undecayed particle reaches detector #1 (closed form).

    ``target`` is either a beam (with ``geo``) or a :class:`CowPhases`; in the
    latter case the overall survival factor defaults to 1.
    """
    ph, s = _resolve(target, geo)
    return _p_d1_closed(ph, s if surv is None else surv, bs)


def detector1_probability_amplitude(target, geo=None, bs=BALANCED_SPLITTER, surv=None) -> float:
    """Same probability from the modulus-squared of the two-path amplitude sum."""
    ph, s = _resolve(target, geo)
    dyn = 0.0
    if not isinstance(target, CowPhases):
        dyn = target.p0 * (geo.H0 + geo.L0) / target.hbar
    return _p_d1_amplitude(ph, s if surv is None else surv, bs, dyn)


def detector2_probability(target, geo=None, bs=BALANCED_SPLITTER, surv=None) -> float:
    """Detector #2, obtained from detector #1 and splitter unitarity."""
    ph, s = _resolve(target, geo)
    return _p_d2_closed(ph, s if surv is None else surv, bs)


def detector2_probability_amplitude(target, geo=None, bs=BALANCED_SPLITTER, surv=None) -> float:
    ph, s = _resolve(target, geo)
    return _p_d2_amplitude(ph, s if surv is None else surv, bs)


def _phases(target, geo):
    return target if isinstance(target, CowPhases) else leg_phases(target, geo)


def intensity(target, geo=None, I0: float = 1.0) -> float:
    if not I0 > 0:
        raise DomainError(f"I0 must be > 0, got {I0!r}")
    ph = _phases(target, geo)
    return 0.5 * I0 * (1.0 + visibility(ph) * math.cos(ph.q_cow * ph.sin_alpha))


def visibility(target, geo=None) -> float:
    ph = _phases(target, geo)
    if ph.q_ucow == 0:
        return 1.0
    return sech(ph.q_ucow * ph.sin_alpha)


def predictability(target, geo=None) -> float:
    ph = _phases(target, geo)
    if ph.q_ucow == 0:
        return 0.0
    return math.tanh(abs(ph.q_ucow * ph.sin_alpha))


def predictability_from_paths(target, geo=None) -> float:
    """Predictability from single-path probabilities with splitter factors stripped."""
    ph = _phases(target, geo)
    # scale by the common factor so nothing underflows
    lo = min(ph.phi_ABD.imag_part, ph.phi_ACD.imag_part)
    p_abd = math.exp(-2.0 * (ph.phi_ABD.imag_part - lo))
    p_acd = math.exp(-2.0 * (ph.phi_ACD.imag_part - lo))
    return abs(p_abd - p_acd) / (p_abd + p_acd)


def upper_leg_momentum(b: BeamParticle, geo: CowGeometry, g: float | None = None) -> float:
    """Momentum on the raised leg CD from energy conservation."""
    g = b.constants.g_std if g is None else g
    p2 = b.p0 ** 2 - 2.0 * b.mass ** 2 * g * geo.H0 * math.sin(geo.alpha)
    if p2 <= 0:
        raise DomainError("particle cannot climb to the upper leg")
    return math.sqrt(p2)


def upper_leg_survival_length(b: BeamParticle, geo: CowGeometry, g: float | None = None) -> float:
    if b.stable:
        return math.inf
    return upper_leg_momentum(b, geo, g) / (b.mass * b.gamma)


def equivalent_path_difference(b: BeamParticle, geo: CowGeometry, g: float | None = None) -> float:
    """Packet displacement that maps the COW pattern onto the double-slit one."""
    g = b.constants.g_std if g is None else g
    return b.mass ** 2 * g * geo.H0 * geo.L0 * math.sin(geo.alpha) / b.p0 ** 2


class CowRow(NamedTuple):
    alpha: float
    p_d1: float
    intensity: float
    visibility: float
    predictability: float
    duality_residual: float
    cow_phase: float
    ucow_phase: float


def _row(alpha, ph, surv, I0):
    v = visibility(ph)
    p = predictability(ph)
    return CowRow(alpha, _p_d1_closed(ph, surv, BALANCED_SPLITTER), intensity(ph, I0=I0), v, p,
                  v * v + p * p - 1.0, ph.q_cow * ph.sin_alpha, ph.q_ucow * ph.sin_alpha)


def _alpha_grid(alpha_range, n_points):
    lo, hi = alpha_range
    if n_points < 2:
        raise DomainError("n_points must be >= 2")
    if not hi > lo:
        raise DomainError(f"inverted or empty range ({lo}, {hi})")
    if lo < -math.pi / 2 or hi > math.pi / 2:
        raise GeometryError("alpha must stay within [-pi/2, pi/2]")
    grid = np.linspace(lo, hi, n_points)
    grid[0], grid[-1] = lo, hi
    return [float(a) for a in grid]


def _map(func, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, items))
    return [func(x) for x in items]


def rotation_scan(b: BeamParticle, geo: CowGeometry, alpha_range, n_points: int,
                  I0: float = 1.0, threads: int = 1) -> list[CowRow]:
    def work(alpha):
        g = geo.tilted(alpha)
        return _row(alpha, leg_phases(b, g), survival(b, g), I0)

    return _map(work, _alpha_grid(alpha_range, n_points), threads)


def rotation_scan_q(q_cow: float, q_ucow: float, alpha_range, n_points: int,
                    aspect: float = 1.0, I0: float = 1.0, threads: int = 1) -> list[CowRow]:
    """Rotation scan for chosen dimensionless ``q`` values (survival factor 1)."""
    def work(alpha):
        return _row(alpha, phases_from_q(q_cow, q_ucow, alpha, aspect), 1.0, I0)

    return _map(work, _alpha_grid(alpha_range, n_points), threads)
