"""Steady-beam double-slit observables for undecayed unstable particles.

Both slits sit at the same distance from the source, so the only asymmetry
between the two paths is the slit-to-detector length: ``delta_s = s_BD - s_CD``.
With ``P0 = 1``:

    P(D) = exp(-s_BD/ell0) + exp(-s_CD/ell0)
           + 2 exp(-(s_BD + s_CD)/(2 ell0)) cos(delta_s/lambda0)
    I    = (I0/2) [1 + sech(delta_s / 2 ell0) cos(delta_s / lambda0)]
    V    = sech(delta_s / 2 ell0)
    Pred = tanh(|delta_s| / 2 ell0)
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline

from ._hyper import sech
from .core import BeamParticle
from .duality import visibility_from_extrema
from .errors import DomainError, GeometryError

__all__ = [
    "SlitGeometry",
    "IntensityPoint",
    "ScanRow",
    "detection_probability",
    "intensity",
    "visibility",
    "predictability",
    "predictability_forms",
    "fringe_scan",
    "extract_visibility",
]


@dataclass(frozen=True)
class SlitGeometry:
    s_BD: float
    s_CD: float
    equal_source_arms: bool = True

    def __post_init__(self):
        if not (self.s_BD > 0 and self.s_CD > 0):
            raise GeometryError(f"slit-to-detector paths must be > 0, got {self.s_BD}, {self.s_CD}")
        if not (math.isfinite(self.s_BD) and math.isfinite(self.s_CD)):
            raise GeometryError("slit-to-detector paths must be finite")
        if not self.equal_source_arms:
            raise GeometryError("only s_AB == s_AC is modelled")

    @property
    def delta_s(self) -> float:
        return self.s_BD - self.s_CD

    @classmethod
    def from_delta(cls, delta_s: float, mean_path: float) -> "SlitGeometry":
        return cls(mean_path + 0.5 * delta_s, mean_path - 0.5 * delta_s)

    @classmethod
    def from_screen(cls, d: float, x: float, L: float) -> "SlitGeometry":
        """Slits B at ``-d/2`` and C at ``+d/2`` on the z = 0 plane, detector at ``(x, L)``.

        Path lengths are exact point-to-point distances (no small-angle step).
        """
        if not (d > 0 and L > 0):
            raise GeometryError("slit separation and screen distance must be > 0")
        return cls(math.hypot(x + 0.5 * d, L), math.hypot(x - 0.5 * d, L))


@dataclass(frozen=True)
class IntensityPoint:
    delta_s: float
    probability: float
    intensity: float
    I0: float


def _cos_arg(b: BeamParticle, delta_s: float) -> float:
    return b.p0 * delta_s / b.hbar


def detection_probability(b: BeamParticle, geo: SlitGeometry) -> float:
    a = geo.s_BD * b.inv_ell0
    c = geo.s_CD * b.inv_ell0
    return (math.exp(-a) + math.exp(-c)
            + 2.0 * math.exp(-0.5 * (a + c)) * math.cos(_cos_arg(b, geo.delta_s)))


def visibility(b: BeamParticle, delta_s: float) -> float:
    if b.stable:
        return 1.0
    return sech(0.5 * delta_s * b.inv_ell0)


def intensity(b: BeamParticle, geo: SlitGeometry, I0: float = 1.0) -> IntensityPoint:
    if not I0 > 0:
        raise DomainError(f"I0 must be > 0, got {I0!r}")
    ds = geo.delta_s
    value = 0.5 * I0 * (1.0 + visibility(b, ds) * math.cos(_cos_arg(b, ds)))
    return IntensityPoint(ds, detection_probability(b, geo), value, I0)


class PredictabilityForms(NamedTuple):
    tanh_form: float
    ratio_form: float


def predictability_forms(b: BeamParticle, geo: SlitGeometry) -> PredictabilityForms:
    """Predictability from the closed form and from the single-path probability ratio."""
    if b.stable:
        return PredictabilityForms(0.0, 0.0)
    a = geo.s_BD * b.inv_ell0
    c = geo.s_CD * b.inv_ell0
    closed = math.tanh(0.5 * abs(a - c))
    # the ratio is scale invariant: divide both probabilities by the larger one
    # so nothing underflows however long the paths are
    shift = min(a, c)
    p_bd = math.exp(-(a - shift))
    p_cd = math.exp(-(c - shift))
    ratio = abs((p_cd - p_bd) / (p_cd + p_bd))
    return PredictabilityForms(closed, ratio)


def predictability(b: BeamParticle, geo: SlitGeometry) -> float:
    return predictability_forms(b, geo).tanh_form


class ScanRow(NamedTuple):
    delta_s: float
    probability: float
    intensity: float
    v_closed: float
    v_extracted: float
    predictability: float
    duality_residual: float
    v_extracted_valid: bool
    delta_s_peak: float


def _scan_point(b, ds, mean_path, I0):
    geo = SlitGeometry.from_delta(ds, mean_path)
    pt = intensity(b, geo, I0)
    v = visibility(b, ds)
    p = predictability(b, geo)
    return pt, v, p


def fringe_scan(b: BeamParticle, delta_s_range, n_points: int, mean_path: float,
                I0: float = 1.0, threads: int = 1, extraction: str = "envelope") -> list[ScanRow]:
    """Sweep ``delta_s`` uniformly, holding ``(s_BD + s_CD)/2`` fixed.

    Rows at interior intensity maxima carry the visibility extracted from the
    scan itself (see :func:`extract_visibility`) and the refined peak position
    ``delta_s_peak``; all other rows carry NaN in both, with
    ``v_extracted_valid`` False.
    """
    lo, hi = delta_s_range
    if n_points < 2:
        raise DomainError("n_points must be >= 2")
    if not hi > lo:
        raise DomainError(f"inverted or empty range ({lo}, {hi})")
    if mean_path - 0.5 * max(abs(lo), abs(hi)) <= 0:
        raise GeometryError("mean path too short for the requested delta_s range")
    grid = np.linspace(lo, hi, n_points)
    grid[0], grid[-1] = lo, hi

    def work(ds):
        return _scan_point(b, float(ds), mean_path, I0)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(work, grid))
    else:
        points = [work(ds) for ds in grid]

    intens = np.array([pt.intensity for pt, _, _ in points])
    extracted = {i: (xp, v) for i, xp, v in extract_visibility(grid, intens, mode=extraction)}
    rows = []
    for i, (pt, v, p) in enumerate(points):
        xp, ve = extracted.get(i, (math.nan, math.nan))
        rows.append(ScanRow(pt.delta_s, pt.probability, pt.intensity, v, ve, p,
                            v * v + p * p - 1.0, i in extracted, xp))
    return rows


def _local_extrema(y, kind):
    n = len(y)
    idx = []
    for i in range(1, n - 1):
        if kind == "max" and y[i] > y[i - 1] and y[i] >= y[i + 1]:
            idx.append(i)
        elif kind == "min" and y[i] < y[i - 1] and y[i] <= y[i + 1]:
            idx.append(i)
    return idx


def _vertex(x, y, i):
    """Parabola through three samples around index ``i``: (x_peak, y_peak)."""
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    h = x[i + 1] - x[i]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0:
        return x[i], y1
    d = 0.5 * (y0 - y2) / denom
    return x[i] + d * h, y1 - 0.25 * (y0 - y2) * d


def extract_visibility(x, y, mode: str = "envelope"):
    """Fringe visibility ``(Imax - Imin)/(Imax + Imin)`` read off a sampled pattern.

    Extrema are located on the samples and refined with a three-point parabola.

    ``mode="pairwise"`` pairs each interior maximum with the nearest minimum
    on its larger-``|x|`` side.  That is the literal adjoining-extrema rule; it
    is biased when the envelope changes appreciably over half a fringe.

    ``mode="envelope"`` pairs each maximum with the lower envelope evaluated
    at the maximum's own position, using a natural cubic spline through the
    refined minima.  Maxima outside the span of the minima are skipped.

    Returns a list of ``(sample_index, x_peak, visibility)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    maxima = [(i,) + _vertex(x, y, i) for i in _local_extrema(y, "max")]
    minima = [_vertex(x, y, i) for i in _local_extrema(y, "min")]
    out = []
    if not maxima or not minima:
        return out
    mx = np.array([m[0] for m in minima])
    my = np.array([m[1] for m in minima])
    if mode == "pairwise":
        for i, xp, yp in maxima:
            side = mx > xp if xp >= 0 else mx < xp
            if not np.any(side):
                continue
            j = np.flatnonzero(side)[np.argmin(np.abs(mx[side] - xp))]
            out.append((i, xp, visibility_from_extrema(yp, max(my[j], 0.0))))
    elif mode == "envelope":
        if len(minima) < 2:
            return out
        lower = CubicSpline(mx, my, bc_type="natural")
        for i, xp, yp in maxima:
            if xp <= mx[0] or xp >= mx[-1]:
                continue
            out.append((i, xp, visibility_from_extrema(yp, max(float(lower(xp)), 0.0))))
    else:
        raise DomainError(f"unknown extraction mode {mode!r}")
    return out
