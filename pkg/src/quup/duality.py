"""Visibility, predictability and the duality relation ``P**2 + V**2 <= 1``."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = ["DualityResult", "visibility_from_extrema", "predictability_from_probs", "duality_check"]


def visibility_from_extrema(i_max: float, i_min: float) -> float:
    """Contrast of an adjoining maximum/minimum pair."""
    if i_min < 0 or i_max < 0:
        raise DomainError(f"intensities must be >= 0, got ({i_max}, {i_min})")
    if i_min > i_max:
        raise DomainError(f"i_min ({i_min}) exceeds i_max ({i_max})")
    if i_max == 0:
        raise DomainError("both intensities are zero")
    return (i_max - i_min) / (i_max + i_min)


def predictability_from_probs(p1: float, p2: float) -> float:
    """A-priori which-way information ``|p1 - p2| / (p1 + p2)``.

    Only the ratio matters, so probabilities that do not sum to one (particles
    lost to decay or absorption) are fine.
    """
    if p1 < 0 or p2 < 0:
        raise DomainError(f"probabilities must be >= 0, got ({p1}, {p2})")
    if p1 + p2 == 0:
        raise DomainError("no particle reaches the detector (p1 = p2 = 0)")
    return abs(p1 - p2) / (p1 + p2)


@dataclass(frozen=True)
class DualityResult:
    visibility: float
    predictability: float
    residual: float
    tolerance: float

    @property
    def coherent(self) -> bool:
        return abs(self.residual) <= self.tolerance

    @property
    def violation(self) -> bool:
        # P^2 + V^2 > 1 is unphysical; seeing it means a computational error upstream
        return self.residual > self.tolerance


def duality_check(v: float, p: float, tolerance: float = 1e-9) -> DualityResult:
    for name, x in (("visibility", v), ("predictability", p)):
        if not (math.isfinite(x) and 0.0 <= x <= 1.0):
            raise DomainError(f"{name} must lie in [0, 1], got {x!r}")
    return DualityResult(v, p, v * v + p * p - 1.0, tolerance)
