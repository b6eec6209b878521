"""Command-line front end.

::

    quup dslit --config visibility_scan.toml --out visibility_scan.csv
    quup cow --config cow.toml --format json --threads 4
    quup verify

Exit codes: 0 success, 2 configuration error, 3 numeric error (including a
failed ``verify`` check), 4 I/O error.  ``QUUP_CONSTANTS`` may name a JSON
file that replaces the built-in constants table.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from . import cow as cowmod
from . import doubleslit as ds
from . import wavepacket as wp
from .config import EXPERIMENTS, RunConfig, parse_config
from .core import DEFAULT_CONSTANTS, PhysicalConstants, load_constants, make_beam, neutron_beam
from .duality import predictability_from_probs, visibility_from_extrema
from .errors import ConfigError, DataError, DomainError, GeometryError, NumericError
from .propagator import PathLeg, SampledLineProfile, propagate
from .quadrature import integrate

CONSTANTS_ENV = "QUUP_CONSTANTS"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

# column name -> description; every emitted column appears here
COLUMNS = {
    "dslit": [
        ("delta_s_m", "path difference s_BD - s_CD [m]"),
        ("delta_s_over_lambda0", "path difference in units of lambda0"),
        ("probability", "detection probability at D [1]"),
        ("intensity", "normalised intensity [I0]"),
        ("visibility_closed", "sech(delta_s / 2 ell0)"),
        ("visibility_extracted", "fringe contrast read off the scan; NaN off the maxima"),
        ("visibility_extracted_valid", "true on rows carrying an extracted visibility"),
        ("delta_s_peak_m", "refined fringe maximum position [m]; NaN off the maxima"),
        ("predictability", "tanh(|delta_s| / 2 ell0)"),
        ("duality_residual", "V^2 + P^2 - 1"),
    ],
    "cow": [
        ("alpha_rad", "rotation angle [rad]"),
        ("alpha_deg", "rotation angle [deg]"),
        ("p_d1", "detector-1 probability [1]"),
        ("intensity", "normalised detector-1 intensity [I0]"),
        ("visibility", "sech(q_ucow sin alpha)"),
        ("predictability", "tanh|q_ucow sin alpha|"),
        ("duality_residual", "V^2 + P^2 - 1"),
        ("cow_phase", "q_cow sin alpha [rad]"),
        ("ucow_phase", "q_ucow sin alpha [1]"),
    ],
    "packet": [
        ("s1_m", "path 1 length [m]"),
        ("s2_m", "path 2 length [m]"),
        ("sigma0_m", "packet width [m]"),
        ("P1_numeric", "path-1 probability by quadrature"),
        ("P1_analytic", "path-1 probability, closed form"),
        ("P2_numeric", "path-2 probability by quadrature"),
        ("P2_analytic", "path-2 probability, closed form"),
        ("P12_numeric", "interference term by quadrature"),
        ("P12_analytic", "interference term, closed form"),
        ("P_total_numeric", "P1 + P2 + P12 by quadrature"),
        ("P_total_analytic", "P1 + P2 + P12, closed form"),
        ("P_steady", "steady-beam detection probability"),
        ("ratio_to_steady", "P_total_numeric / P_steady; NaN when P_steady = 0"),
        ("ratio_valid", "true when P_steady > 0"),
        ("error_estimate", "quadrature error estimate (absolute)"),
        ("lower_limit_discrepancy", "largest |integral over t<0| / integral over t>=0"),
        ("path_over_width", "min(s1, s2) / sigma0"),
        ("decay_per_width", "gamma sigma0 / v_g"),
        ("spread_margin", "sigma0 / sqrt(hbar L / 2 p0)"),
        ("validity_ok", "true when all packet approximations hold"),
    ],
    "duality-report": [
        ("x", "delta_s / 2 ell0 for the slit, q_ucow sin alpha for COW"),
        ("dslit_visibility", "sech(x)"),
        ("dslit_predictability", "tanh form"),
        ("dslit_predictability_ratio", "|P_B - P_C| / (P_B + P_C) form"),
        ("dslit_residual", "V^2 + P^2 - 1, slit"),
        ("cow_visibility", "COW visibility"),
        ("cow_predictability", "COW predictability, tanh form"),
        ("cow_predictability_paths", "COW predictability from path probabilities"),
        ("cow_residual", "V^2 + P^2 - 1, COW"),
        ("extrema_visibility", "(I_max - I_min)/(I_max + I_min) of the closed-form fringe"),
        ("probs_predictability", "|p1 - p2|/(p1 + p2) from the path survival factors"),
    ],
    "verify": [
        ("check", "oracle name"),
        ("value", "measured discrepancy"),
        ("tolerance", "pass threshold"),
        ("passed", "true when value <= tolerance"),
    ],
}


def _map(func, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, items))
    return [func(x) for x in items]


def _grid(sweep):
    g = np.linspace(sweep.start, sweep.stop, sweep.n_points)
    g[0], g[-1] = sweep.start, sweep.stop
    return [float(v) for v in g]


# ---------------------------------------------------------------- experiments

def run_dslit(cfg: RunConfig, threads: int = 1):
    b, geo, sw = cfg.beam, cfg.geometry, cfg.sweep
    scale = b.lambda0 if sw.parameter == "delta_s_over_lambda0" else 1.0
    rows = ds.fringe_scan(b, (sw.start * scale, sw.stop * scale), sw.n_points,
                          geo["mean_path_m"], I0=geo["I0"], threads=threads,
                          extraction=geo["extraction"])
    return [[r.delta_s, r.delta_s / b.lambda0, r.probability, r.intensity, r.v_closed,
             r.v_extracted, r.v_extracted_valid, r.delta_s_peak, r.predictability,
             r.duality_residual] for r in rows]


def run_cow(cfg: RunConfig, threads: int = 1):
    geo, sw = cfg.geometry, cfg.sweep
    to_rad = math.pi / 180.0 if sw.parameter == "alpha_deg" else 1.0
    alpha_range = (sw.start * to_rad, sw.stop * to_rad)
    if geo["q_cow"] is not None:
        rows = cowmod.rotation_scan_q(geo["q_cow"], geo["q_ucow"], alpha_range, sw.n_points,
                                      aspect=geo["H0_m"] / geo["L0_m"], I0=geo["I0"], threads=threads)
    else:
        cg = cowmod.CowGeometry(geo["H0_m"], geo["L0_m"], geo["alpha_rad"])
        rows = cowmod.rotation_scan(cfg.beam, cg, alpha_range, sw.n_points, I0=geo["I0"],
                                    threads=threads)
    return [[r.alpha, math.degrees(r.alpha), r.p_d1, r.intensity, r.visibility, r.predictability,
             r.duality_residual, r.cow_phase, r.ucow_phase] for r in rows]


def _packet_row(b, s1, s2, sigma0, N0):
    setup = wp.TwoPathPacketSetup(s1, s2, wp.make_packet(b, sigma0, N0))
    num = wp.detection_probability_numeric(setup)
    ana = wp.detection_probability_analytic(setup)
    steady = ds.detection_probability(b, ds.SlitGeometry(s1, s2))
    ratio = num.P_total / steady if steady > 0 else math.nan
    val = num.validity
    return [s1, s2, sigma0, num.P1, ana.P1, num.P2, ana.P2, num.P12, ana.P12,
            num.P_total, ana.P_total, steady, ratio, steady > 0, num.error_estimate,
            max(abs(d) for d in num.lower_limit_discrepancy), val.path_over_width,
            val.decay_per_width, val.spread_margin, val.ok]


def run_packet(cfg: RunConfig, threads: int = 1):
    geo, sw = cfg.geometry, cfg.sweep
    s1 = geo["s1_m"]

    def work(v):
        if sw.parameter == "delta_s_m":
            return _packet_row(cfg.beam, s1, s1 - v, geo["sigma0_m"], geo["N0"])
        return _packet_row(cfg.beam, s1, geo["s2_m"], v, geo["N0"])

    return _map(work, _grid(cfg.sweep), threads)


def run_duality_report(cfg: RunConfig, threads: int = 1):
    b, geo = cfg.beam, cfg.geometry
    xs = _grid(cfg.sweep)
    mean_path = b.ell0 * (max(abs(x) for x in xs) + 1.0)

    def work(x):
        sg = ds.SlitGeometry.from_delta(2.0 * b.ell0 * x, mean_path)
        v_ds = ds.visibility(b, sg.delta_s)
        forms = ds.predictability_forms(b, sg)
        ph = cowmod.phases_from_q(geo["q_cow"], abs(x), math.copysign(math.pi / 2, x), geo["aspect"])
        v_c = cowmod.visibility(ph)
        p_c = cowmod.predictability(ph)
        return [x, v_ds, forms.tanh_form, forms.ratio_form, v_ds ** 2 + forms.tanh_form ** 2 - 1.0,
                v_c, p_c, cowmod.predictability_from_paths(ph), v_c ** 2 + p_c ** 2 - 1.0,
                visibility_from_extrema(1.0 + v_ds, 1.0 - v_ds),
                predictability_from_probs(1.0, math.exp(-2.0 * abs(x)))]

    return _map(work, xs, threads)


# -------------------------------------------------------------------- verify

def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def oracle_checks(constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """Cross-module oracle suite as ``(name, value, tolerance)`` triples."""
    checks = []
    beam = neutron_beam(constants=constants)

    # duality residuals on a dense grid
    xs = np.linspace(0.0, 10.0, 2001)
    dsb = make_beam(1.0, 1.0, 1.0, replace(constants, hbar=1.0))
    res_ds = max(abs(ds.visibility(dsb, 2 * dsb.ell0 * x) ** 2
                     + ds.predictability(dsb, ds.SlitGeometry.from_delta(2 * dsb.ell0 * x, dsb.ell0 * 12)) ** 2
                     - 1.0) for x in xs)
    checks.append(("duality residual, double slit", res_ds, 1e-12))
    res_cow = 0.0
    for x in xs:
        ph = cowmod.phases_from_q(700.0, float(x), math.pi / 2)
        res_cow = max(res_cow, abs(cowmod.visibility(ph) ** 2 + cowmod.predictability(ph) ** 2 - 1.0))
    checks.append(("duality residual, COW", res_cow, 1e-12))

    # COW closed form against the amplitude sum
    worst = 0.0
    for q_u in (0.1, 1.0, 5.0):
        for a in np.linspace(-math.pi / 2, math.pi / 2, 1000):
            ph = cowmod.phases_from_q(707.0, q_u, float(a))
            worst = max(worst, _rel(cowmod.detector1_probability(ph),
                                    cowmod.detector1_probability_amplitude(ph)))
    checks.append(("COW closed form vs amplitude sum", worst, 1e-12))

    # COW golden numbers
    q_c, q_u = cowmod.q_factors(beam, cowmod.STANDARD_LOOP)
    checks.append(("q_cow in [600, 800]", 0.0 if 600 <= q_c <= 800 else abs(q_c - 700), 0.0))
    checks.append(("q_ucow in [3e-15, 7e-15]", 0.0 if 3e-15 <= q_u <= 7e-15 else abs(q_u - 5e-15), 0.0))

    # propagated leg phases against the closed-form phase difference
    for alpha in (0.3, math.pi / 2):
        g = cowmod.STANDARD_LOOP.tilted(alpha)
        closed = cowmod.leg_phases(beam, g).delta_phi
        prop = cowmod.propagated_leg_phases(beam, g).delta_phi
        checks.append((f"propagator vs closed-form COW phase, alpha={alpha:.3f}",
                       _rel(closed.real_part, prop.real_part), 1e-9))

    # steady beam against wave packets, dimensionless units with k0 = 1e4
    unit = replace(constants, hbar=1.0)
    pb = make_beam(1.0, 1e4, 1.0, unit)
    ratios = []
    worst_comp = 0.0
    for s1, d in ((40.0, 0.0), (45.0, 1e-4), (50.0, -2e-4)):
        setup = wp.TwoPathPacketSetup(s1, s1 - d, wp.make_packet(pb, 1.0))
        num = wp.detection_probability_numeric(setup)
        ana = wp.detection_probability_analytic(setup)
        worst_comp = max(worst_comp, _rel(num.P1, ana.P1), _rel(num.P2, ana.P2),
                         _rel(num.P12, ana.P12))
        ratios.append(num.P_total / ds.detection_probability(pb, ds.SlitGeometry(s1, s1 - d)))
    checks.append(("packet numeric vs analytic components", worst_comp, 1e-6))
    checks.append(("packet / steady ratio spread", (max(ratios) - min(ratios)) / min(ratios), 1e-5))

    # lower-limit discrepancy shrinks monotonically with s/sigma0
    disc = []
    for r in (5.0, 10.0, 20.0, 30.0):
        setup = wp.TwoPathPacketSetup(r, r, wp.make_packet(make_beam(1.0, 1.0, 1e-4, unit), 1.0))
        disc.append(max(abs(d) for d in wp.detection_probability_numeric(setup).lower_limit_discrepancy))
    monotone = all(a > b for a, b in zip(disc, disc[1:]))
    checks.append(("lower-limit discrepancy at s = 30 sigma0", disc[-1], 1e-10))
    checks.append(("lower-limit discrepancy monotone", 0.0 if monotone else 1.0, 0.0))

    # quadrature against a closed-form Gaussian-times-exponential
    a, mu, sig = 0.3, 5.0, 0.7
    exact = math.exp(-a * mu + 0.5 * a * a * sig * sig)
    got = integrate(lambda t: np.exp(-(t - mu) ** 2 / (2 * sig * sig) - a * t) / (sig * math.sqrt(2 * math.pi)),
                    [mu - 40 * sig, mu, mu + 40 * sig]).value
    checks.append(("GK15 quadrature vs closed form", _rel(got, exact), 1e-12))

    # stable limits
    sb = neutron_beam(lifetime=None, constants=constants)
    v_stable = ds.visibility(sb, 1e-9)
    p_stable = ds.predictability(sb, ds.SlitGeometry(1.0, 1.0 + 1e-9))
    checks.append(("stable beam: V = 1, P = 0", abs(v_stable - 1.0) + abs(p_stable), 0.0))

    # a free-space leg reproduces exp(-s / 2 ell0)
    amp = propagate(beam, [PathLeg((0, 0, 0), (1.0, 0, 0))])
    checks.append(("propagator survival amplitude", _rel(abs(amp.amplitude), math.exp(-0.5 / beam.ell0)), 1e-15))
    prof = SampledLineProfile.from_function(lambda s: 0.0 * s, 1.0, 11)
    zero = propagate(beam, [PathLeg((0, 0, 0), (1.0, 0, 0))], prof)
    checks.append(("sampled zero potential adds no phase", abs(zero.potential_phase.real_part), 0.0))
    return checks


def format_report(checks) -> str:
    width = max(len(name) for name, _, _ in checks)
    lines = [f"{'check':<{width}}  {'value':>12}  {'tolerance':>10}  result"]
    for name, value, tol in checks:
        lines.append(f"{name:<{width}}  {value:>12.3e}  {tol:>10.1e}  {'PASS' if value <= tol else 'FAIL'}")
    n_fail = sum(1 for _, v, t in checks if not v <= t)
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------------- output

def _fmt(value, precision):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return format(float(value), f".{precision}g")


def _json_value(value, precision):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, str):
        return value
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(format(value, f".{precision}g"))


def metadata(experiment, constants, constants_source, raw_config):
    return {
        "package": "quup",
        "version": __version__,
        "experiment": experiment,
        "constants": constants.as_dict(),
        "constants_source": constants_source,
        "config": raw_config,
    }


def render(experiment, rows, meta, fmt="csv", precision=12) -> str:
    cols = COLUMNS[experiment]
    names = [c for c, _ in cols]
    if fmt == "json":
        doc = {
            "metadata": meta,
            "columns": [{"name": c, "description": d} for c, d in cols],
            "rows": [dict(zip(names, (_json_value(v, precision) for v in row))) for row in rows],
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    for key in ("package", "version", "experiment", "constants_source"):
        buf.write(f"# {key}: {meta[key]}\n")
    buf.write(f"# constants: {json.dumps(meta['constants'], sort_keys=True)}\n")
    buf.write(f"# config: {json.dumps(meta['config'], sort_keys=True)}\n")
    for c, d in cols:
        buf.write(f"# column {c}: {d}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in rows:
        writer.writerow([_fmt(v, precision) for v in row])
    return buf.getvalue()


RUNNERS = {
    "dslit": run_dslit,
    "cow": run_cow,
    "packet": run_packet,
    "duality-report": run_duality_report,
}


def _constants_from_env():
    path = os.environ.get(CONSTANTS_ENV)
    if not path:
        return DEFAULT_CONSTANTS, "builtin"
    return load_constants(path), path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quup", description="Interferometry of undecayed unstable particles.")
    parser.add_argument("--version", action="version", version=f"quup {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, required=name != "verify", help="TOML run configuration")
        p.add_argument("--out", type=Path, help="output file (default: config output.path or stdout)")
        p.add_argument("--format", choices=("csv", "json"), help="output format (overrides config)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for sweep points")
    return parser


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="")


def _run(args) -> int:
    constants, source = _constants_from_env()
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")

    if args.command == "verify":
        cfg = None
        if args.config is not None:
            cfg = parse_config(args.config.read_text(encoding="utf-8"), constants, "verify")
        checks = oracle_checks(constants)
        sys.stdout.write(format_report(checks))
        out = args.out or (cfg.output.path if cfg else None)
        if out is not None:
            fmt = args.format or (cfg.output.format if cfg else "csv")
            rows = [[n, v, t, v <= t] for n, v, t in checks]
            meta = metadata("verify", constants, source, cfg.raw if cfg else {})
            _write(render("verify", rows, meta, fmt, cfg.output.precision if cfg else 12), out)
        return EXIT_OK if all(v <= t for _, v, t in checks) else EXIT_NUMERIC

    cfg = parse_config(args.config.read_text(encoding="utf-8"), constants, args.command)
    rows = RUNNERS[args.command](cfg, args.threads)
    meta = metadata(args.command, constants, source, cfg.raw)
    text = render(args.command, rows, meta, args.format or cfg.output.format, cfg.output.precision)
    _write(text, args.out or cfg.output.path)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (ConfigError, DataError, DomainError, GeometryError) as exc:
        print(f"quup: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"quup: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"quup: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
