"""Overflow-safe hyperbolic helpers (scalar and ndarray)."""
from __future__ import annotations

import numpy as np


def sech(x):
    """1/cosh(x) without overflow for large |x|."""
    e = np.exp(-np.abs(np.asarray(x, dtype=float)))
    out = 2.0 * e / (1.0 + e * e)
    return float(out) if out.ndim == 0 else out


def tanh_abs(x):
    out = np.tanh(np.abs(np.asarray(x, dtype=float)))
    return float(out) if out.ndim == 0 else out
