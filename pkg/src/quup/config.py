"""Run configuration: a strict TOML schema with units in the key names.

Example (double-slit sweep)::

    experiment = "dslit"

    [beam]
    preset = "thermal-neutron"

    [geometry]
    mean_path_m = 1.0

    [sweep]
    parameter = "delta_s_over_lambda0"
    start = -40.0
    stop = 40.0
    n_points = 2000

    [output]
    path = "dslit.csv"
    format = "csv"
    precision = 12

Unknown keys anywhere are rejected.  See the README for the full key list.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import (
    DEFAULT_CONSTANTS,
    NEUTRON_LIFETIME_S,
    THERMAL_NEUTRON_SPEED,
    BeamParticle,
    PhysicalConstants,
    make_beam,
)
from .errors import ConfigError, DomainError

EXPERIMENTS = ("dslit", "cow", "packet", "duality-report", "verify")
FORMATS = ("csv", "json")
PRESETS = ("thermal-neutron", "stable-neutron")

BEAM_KEYS = {
    "preset", "mass_kg", "velocity_m_per_s", "momentum_kg_m_per_s",
    "gamma_per_s", "lifetime_s", "ell0_over_lambda0",
}
GEOMETRY_KEYS = {
    "dslit": {"mean_path_m": 1.0, "delta_s_m": 0.0, "I0": 1.0, "extraction": "envelope"},
    "cow": {"H0_m": 0.1, "L0_m": 0.1, "alpha_rad": 0.0, "I0": 1.0,
            "q_cow": None, "q_ucow": None},
    "packet": {"s1_m": None, "s2_m": None, "sigma0_m": None, "N0": 1.0},
    "duality-report": {"q_cow": 0.0, "aspect": 1.0},
    "verify": {},
}
SWEEP_PARAMETERS = {
    "dslit": ("delta_s_m", "delta_s_over_lambda0"),
    "cow": ("alpha_rad", "alpha_deg"),
    "packet": ("delta_s_m", "sigma0_m"),
    "duality-report": ("x",),
    "verify": (),
}
SWEEP_KEYS = {"parameter", "start", "stop", "n_points"}
OUTPUT_KEYS = {"path", "format", "precision"}
TOP_KEYS = {"experiment", "beam", "geometry", "sweep", "output"}


@dataclass(frozen=True)
class Sweep:
    parameter: str
    start: float
    stop: float
    n_points: int


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    format: str = "csv"
    precision: int = 12


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    beam: BeamParticle | None
    geometry: dict
    sweep: Sweep | None
    output: OutputSpec
    raw: dict = field(default_factory=dict)


def _table(doc, key, where):
    value = doc.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"{where}{key}: expected a table")
    return value


def _reject_unknown(table, allowed, where):
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where or 'top level'}: "
                          + ", ".join(f"{where + '.' if where else ''}{k}" for k in unknown))


def _number(table, key, where, *, positive=False, nonneg=False):
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{where}.{key}: must be finite")
    if positive and value <= 0:
        raise ConfigError(f"{where}.{key}: must be > 0, got {value}")
    if nonneg and value < 0:
        raise ConfigError(f"{where}.{key}: must be >= 0, got {value}")
    return value


def build_beam(table: dict, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> BeamParticle:
    _reject_unknown(table, BEAM_KEYS, "beam")
    if "preset" in table:
        extra = set(table) - {"preset"}
        if extra:
            raise ConfigError(f"beam.preset cannot be combined with {sorted(extra)}")
        preset = table["preset"]
        if preset not in PRESETS:
            raise ConfigError(f"beam.preset: unknown preset {preset!r}; choose from {PRESETS}")
        m = constants.m_neutron
        p0 = m * THERMAL_NEUTRON_SPEED
        gamma = 1.0 / NEUTRON_LIFETIME_S if preset == "thermal-neutron" else 0.0
        return make_beam(m, p0, gamma, constants)

    if "mass_kg" not in table:
        raise ConfigError("beam: give either preset or mass_kg")
    m = _number(table, "mass_kg", "beam", positive=True)
    has_v, has_p = "velocity_m_per_s" in table, "momentum_kg_m_per_s" in table
    if has_v == has_p:
        raise ConfigError("beam: give exactly one of velocity_m_per_s, momentum_kg_m_per_s")
    if has_v:
        p0 = m * _number(table, "velocity_m_per_s", "beam", positive=True)
    else:
        p0 = _number(table, "momentum_kg_m_per_s", "beam", positive=True)
    decay_keys = [k for k in ("gamma_per_s", "lifetime_s", "ell0_over_lambda0") if k in table]
    if len(decay_keys) > 1:
        raise ConfigError(f"beam: {decay_keys} are mutually exclusive")
    gamma = 0.0
    if decay_keys == ["gamma_per_s"]:
        gamma = _number(table, "gamma_per_s", "beam", nonneg=True)
    elif decay_keys == ["lifetime_s"]:
        gamma = 1.0 / _number(table, "lifetime_s", "beam", positive=True)
    elif decay_keys == ["ell0_over_lambda0"]:
        ratio = _number(table, "ell0_over_lambda0", "beam", positive=True)
        # ell0 = p0/(m gamma), lambda0 = hbar/p0
        gamma = p0 * p0 / (ratio * m * constants.hbar)
    try:
        return make_beam(m, p0, gamma, constants)
    except DomainError as exc:
        raise ConfigError(f"beam: {exc}") from exc


def _geometry(experiment, table):
    defaults = GEOMETRY_KEYS[experiment]
    _reject_unknown(table, defaults, "geometry")
    geo = {}
    for key, default in defaults.items():
        if key in table:
            if key == "extraction":
                if table[key] not in ("envelope", "pairwise"):
                    raise ConfigError("geometry.extraction: must be 'envelope' or 'pairwise'")
                geo[key] = table[key]
                continue
            positive = key.endswith("_m") and key not in ("delta_s_m",) or key in ("I0", "N0", "aspect")
            nonneg = key in ("q_cow", "q_ucow")
            geo[key] = _number(table, key, "geometry", positive=positive, nonneg=nonneg)
        else:
            geo[key] = default
    if experiment == "cow":
        if not -math.pi / 2 <= geo["alpha_rad"] <= math.pi / 2:
            raise ConfigError("geometry.alpha_rad: must lie in [-pi/2, pi/2]")
        if (geo["q_cow"] is None) != (geo["q_ucow"] is None):
            raise ConfigError("geometry: q_cow and q_ucow must be given together")
    if experiment == "packet":
        missing = [k for k in ("s1_m", "sigma0_m") if geo[k] is None]
        if missing:
            raise ConfigError(f"geometry: missing {', '.join('geometry.' + k for k in missing)}")
        if geo["s2_m"] is None:
            geo["s2_m"] = geo["s1_m"]
    return geo


def _sweep(experiment, table):
    if not table:
        return None
    _reject_unknown(table, SWEEP_KEYS, "sweep")
    missing = sorted(SWEEP_KEYS - set(table))
    if missing:
        raise ConfigError(f"sweep: missing {', '.join('sweep.' + k for k in missing)}")
    param = table["parameter"]
    allowed = SWEEP_PARAMETERS[experiment]
    if param not in allowed:
        raise ConfigError(f"sweep.parameter: {param!r} is not valid for {experiment}; choose from {allowed}")
    n = table["n_points"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ConfigError(f"sweep.n_points: must be an integer >= 2, got {n!r}")
    start = _number(table, "start", "sweep")
    stop = _number(table, "stop", "sweep")
    if not stop > start:
        raise ConfigError("sweep: stop must be greater than start")
    return Sweep(param, start, stop, n)


def _output(table):
    _reject_unknown(table, OUTPUT_KEYS, "output")
    fmt = table.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"output.format: must be one of {FORMATS}, got {fmt!r}")
    precision = table.get("precision", 12)
    if isinstance(precision, bool) or not isinstance(precision, int) or not 1 <= precision <= 17:
        raise ConfigError(f"output.precision: must be an integer in [1, 17], got {precision!r}")
    path = table.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output.path: must be a string")
    return OutputSpec(path, fmt, precision)


def parse_config(text: str, constants: PhysicalConstants = DEFAULT_CONSTANTS,
                 experiment: str | None = None) -> RunConfig:
    """Parse and validate a TOML run configuration.

    ``experiment`` (from the CLI subcommand) fills in or must match the
    document's own ``experiment`` key.
    """
    try:
        doc: dict[str, Any] = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"syntax error: {exc}") from exc
    _reject_unknown(doc, TOP_KEYS, "")
    exp = doc.get("experiment", experiment)
    if exp is None:
        raise ConfigError("experiment: missing")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment: {exp!r} is not one of {EXPERIMENTS}")
    if experiment is not None and exp != experiment:
        raise ConfigError(f"experiment: config says {exp!r} but the command is {experiment!r}")

    # strict schema first, so a typo is reported as such rather than as a missing field
    _reject_unknown(_table(doc, "beam", ""), BEAM_KEYS, "beam")
    _reject_unknown(_table(doc, "geometry", ""), GEOMETRY_KEYS[exp], "geometry")
    _reject_unknown(_table(doc, "sweep", ""), SWEEP_KEYS, "sweep")
    _reject_unknown(_table(doc, "output", ""), OUTPUT_KEYS, "output")

    beam_table = _table(doc, "beam", "")
    beam = None
    if exp in ("dslit", "cow", "packet", "duality-report"):
        if not beam_table and not (exp == "cow" and _table(doc, "geometry", "").get("q_cow") is not None):
            raise ConfigError("beam: missing")
        if beam_table:
            beam = build_beam(beam_table, constants)
    elif beam_table:
        raise ConfigError(f"beam: not used by {exp}")

    geometry = _geometry(exp, _table(doc, "geometry", ""))
    sweep = _sweep(exp, _table(doc, "sweep", ""))
    if exp in ("dslit", "cow", "packet", "duality-report") and sweep is None:
        raise ConfigError(f"sweep: required for {exp}")
    if exp == "duality-report" and beam is not None and beam.stable:
        raise ConfigError("beam: duality-report needs an unstable beam")
    return RunConfig(exp, beam, geometry, sweep, _output(_table(doc, "output", "")), doc)
