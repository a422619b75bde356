"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
``DARKCOOL_WORKERS`` sets the sweep pool size and ``DARKCOOL_OUTDIR`` makes
every command write ``<command>.csv`` there instead of printing to stdout.
"""
from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .. import rates
from ..dynamics import DegenerateSteadyStateError, FitError, IntegrationError
from ..model import PARAM_NAMES, IonParams
from ..spectra import FeatureCountError, absorption_spectrum, fig2_grid, locate_features
from . import io
from .checks import FAIL, self_check
from .runner import run_cooling_dynamics, run_sweep, steady_point
from .scenarios import BUILTIN, Scenario, fig3_params, get_scenario

OUTDIR_ENV = "DARKCOOL_OUTDIR"
NUMERICAL_ERRORS = (DegenerateSteadyStateError, FitError, IntegrationError, FeatureCountError,
                    rates.ResonantPoleError, rates.SingularResolventError, np.linalg.LinAlgError,
                    ArithmeticError)


def _params(args) -> IonParams:
    if args.config:
        p = io.load_config(args.config)
    else:
        p = fig3_params()
    overrides = {}
    for item in args.set or ():
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in PARAM_NAMES:
            raise io.ConfigError(f"bad --set {item!r}")
        try:
            overrides[key] = int(value) if key == "fock_cutoff" else float(value)
        except ValueError:
            raise io.ConfigError(f"bad --set {item!r}") from None
    try:
        return p.with_(**overrides) if overrides else p
    except ValueError as exc:
        raise io.ConfigError(str(exc)) from None


@contextmanager
def _sink(args, name):
    path = args.output
    outdir = args.out_dir or os.environ.get(OUTDIR_ENV)
    if path is None and outdir:
        ext = "jsonl" if args.jsonl else "csv"
        path = Path(outdir) / f"{name}.{ext}"
        path.parent.mkdir(parents=True, exist_ok=True)
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit(args, name, columns, rows):
    rows = list(rows)
    with _sink(args, name) as fh:
        if args.jsonl:
            io.write_jsonl(fh, rows)
        else:
            io.write_csv(fh, columns, rows)


def _info(msg):
    print(msg, file=sys.stderr)


def cmd_evolve(args):
    p = _params(args)
    s = Scenario("evolve", p, evolve_horizon=args.horizon, samples=args.samples)
    res = run_cooling_dynamics(s, method=args.method)
    _emit(args, "evolve", io.TRAJECTORY_COLUMNS, io.trajectory_rows(res.trajectory))
    c = res.comparison
    _info(f"status: {res.status}")
    _info(f"fit: nss = {c['nss_fit']:.6g} (analytic {c['nss_analytic']:.6g}), "
          f"W = {c['w_fit']:.6g} (resolvent {c['w_resolvent']:.6g}, w_max {c['w_max']:.6g})")
    return 0


def cmd_steady(args):
    p = _params(args)
    nss, gap, tail = steady_point(p)
    rows = [{"nss_numeric": nss, "nss_analytic": rates.nss_analytic(p) if p.omega_g > 0 else float("nan"),
             "w_numeric": gap, "tail": tail}]
    _emit(args, "steady", tuple(rows[0]), rows)
    return 0


def cmd_rates(args):
    p = _params(args)
    res = rates.rates_resolvent(p, args.n)
    rows = [{"source": "resolvent", "a_plus": res.a_plus, "a_minus": res.a_minus, "w": res.w}]
    try:
        cf = rates.rates_closed_form(p)
        rows.append({"source": "closed_form", "a_plus": cf.a_plus, "a_minus": cf.a_minus, "w": cf.w})
    except rates.ResonantPoleError as exc:
        _info(f"closed form unavailable: {exc}")
    rows.append({"source": "w_max", "a_plus": 0.0, "a_minus": rates.w_max(p), "w": rates.w_max(p)})
    _emit(args, "rates", ("source", "a_plus", "a_minus", "w"), rows)
    return 0


def _spectrum(args, p):
    s = absorption_spectrum(p, fig2_grid(p, args.half_width, args.points))
    try:
        zeros, peak = locate_features(s)
        _info(f"zeros: {', '.join(f'{z:.6g}' for z in zeros)}; peak at {peak[0]:.6g} ({peak[1]:.4g})")
    except FeatureCountError as exc:
        _info(str(exc))
    rows = ({"delta_r": float(x), "absorption": float(y)} for x, y in zip(s.detunings, s.absorption))
    _emit(args, "spectrum", ("delta_r", "absorption"), rows)
    return 0


def cmd_spectrum(args):
    return _spectrum(args, _params(args))


def _sweep(args, s):
    res = run_sweep(s, workers=args.workers)
    _emit(args, s.name, io.SWEEP_COLUMNS, io.sweep_rows(res))
    bad = [r for r in res.rows if r.status != "ok"]
    if bad:
        _info(f"{len(bad)} of {len(res.rows)} points failed")
    return 2 if len(bad) == len(res.rows) else 0


def cmd_sweep(args):
    p = _params(args)
    try:
        values = [float(v) for v in args.values.split(",")]
        s = Scenario("sweep", p, axis=args.axis, values=values, optimal=args.optimal,
                     outputs=("sweep",))
    except ValueError as exc:
        raise io.ConfigError(str(exc)) from None
    return _sweep(args, s)


def cmd_optimize(args):
    p = _params(args)
    dg = rates.optimal_delta_g(p)
    q = p.with_(delta_g=dg)
    rows = [{"delta_g": dg, "w_max": rates.w_max(q), "w_resolvent": rates.rates_resolvent(q).w}]
    _emit(args, "optimize", tuple(rows[0]), rows)
    return 0


def cmd_check(args):
    p = _params(args) if (args.config or args.set) else None
    report = self_check(p)
    rows = [{"name": r.name, "status": r.status, "residual": r.residual,
             "tolerance": r.tolerance, "detail": r.detail} for r in report]
    _emit(args, "check", ("name", "status", "residual", "tolerance", "detail"), rows)
    return 2 if any(r.status == FAIL for r in report) else 0


def cmd_scenario(args):
    s = get_scenario(args.name)
    if "spectrum" in s.outputs:
        args.half_width, args.points = 2.0, 401
        return _spectrum(args, s.params)
    if s.axis is not None:
        return _sweep(args, s)
    res = run_cooling_dynamics(s)
    _emit(args, s.name, io.TRAJECTORY_COLUMNS, io.trajectory_rows(res.trajectory))
    for k, v in res.comparison.items():
        _info(f"{k}: {v:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="parameter file (key = value per line)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one parameter; repeatable")
    common.add_argument("--output", "-o", help="write results to this file")
    common.add_argument("--out-dir", help=f"output directory (default ${OUTDIR_ENV})")
    common.add_argument("--jsonl", action="store_true", help="JSON lines instead of CSV")
    common.add_argument("--workers", type=int, default=None,
                        help="sweep worker count (default $DARKCOOL_WORKERS or CPU count)")

    ap = argparse.ArgumentParser(prog="darkcool", description="Double-dark-state cooling of a trapped ion.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", parents=[common], help="master-equation cooling run")
    p.add_argument("--horizon", type=float, default=6.0, help="duration in units of 1/W")
    p.add_argument("--samples", type=int, default=301)
    p.add_argument("--method", choices=("expm", "dop853", "rk45"), default=None)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("steady", parents=[common], help="steady-state phonon number")
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("rates", parents=[common], help="cooling and heating rates")
    p.add_argument("--n", type=int, default=1, help="Fock level for the resolvent")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("spectrum", parents=[common], help="absorption of the cooling beam")
    p.add_argument("--half-width", type=float, default=2.0)
    p.add_argument("--points", type=int, default=401)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", parents=[common], help="one-parameter sweep")
    p.add_argument("--axis", required=True, choices=PARAM_NAMES)
    p.add_argument("--values", required=True, help="comma-separated grid")
    p.add_argument("--optimal", action="store_true", help="re-optimize delta_g at each point")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", parents=[common], help="optimal delta_g and peak rate")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("check", parents=[common], help="run the self-check suite")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("scenario", parents=[common], help="run a builtin scenario")
    p.add_argument("name", choices=sorted(BUILTIN))
    p.set_defaults(func=cmd_scenario)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except io.ConfigError as exc:
        _info(f"configuration error: {exc}")
        return 1
    except NUMERICAL_ERRORS as exc:
        _info(f"numerical failure: {type(exc).__name__}: {exc}")
        return 2
    except (ValueError, KeyError) as exc:
        _info(f"configuration error: {exc}")
        return 1
