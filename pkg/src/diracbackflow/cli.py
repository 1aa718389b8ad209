"""Batch command-line front end.

Every subcommand writes a JSON summary and, where there is tabular data, a CSV
file with a header row and a ``.meta.json`` sidecar.  Results are cached on
disk keyed by a hash of the subcommand inputs, the N schedule and the schema
version; a cache hit rewrites byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .eig import EigenSolverError
from .extrapolate import PROFILES, resolve_schedule
from .model import ParameterError, RingParams

SCHEMA_VERSION = 1
CACHE_ENV = "DIRACBACKFLOW_CACHE_DIR"
EXIT_OK, EXIT_BAD_INPUT, EXIT_NUMERICAL = 0, 2, 3

FIG1_BETAS = (0.0, -0.025, -0.05, -0.075)
TABLE1_CHIS = (20.0, 500.0, 1000.0, 10000.0, 100000.0)

log = logging.getLogger("diracbackflow")


class InputError(ValueError):
    pass


# ---------------------------------------------------------------- parsing

def parse_grid(text):
    """'a:b:step' (inclusive) or a comma list."""
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    text = str(text).strip()
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise InputError(f"bad grid {text!r}; expected start:stop:step with step > 0")
        a, b, h = parts
        n = int(math.floor((b - a) / h + 1e-9))
        return [round(a + k * h, 12) for k in range(n + 1)]
    vals = [float(x) for x in text.split(",") if x.strip()]
    if not vals:
        raise InputError("empty grid")
    return vals


def _ints(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with flag defaults (flags override it)")
    common.add_argument("--profile", choices=sorted(PROFILES), default="accurate",
                        help="N schedule profile (default: accurate = 500,700,1000,1400,2000)")
    common.add_argument("--n-schedule", help="explicit comma-separated N schedule; overrides --profile")
    common.add_argument("--out", default=".", help="output directory (default: current directory)")
    common.add_argument("--cache-dir", default=None,
                        help=f"cache directory (default: ${CACHE_ENV} or ~/.cache/diracbackflow)")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                        help="worker threads (default: available parallelism)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks only")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="diracbackflow", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("two-mode", parents=[common], help="two-eigenstate backflow versus alpha")
    s.add_argument("--chi", type=float, default=0.05)
    s.add_argument("--beta", type=float, default=None,
                   help="single beta; default is 0, -0.025, -0.05, -0.075")
    s.add_argument("--alpha-over-pi", type=float, default=None,
                   help="evaluate at this alpha/pi instead of minimizing")
    s.add_argument("--l1", type=int, default=0)
    s.add_argument("--l2", type=int, default=1)

    s = sub.add_parser("infimum", parents=[common], help="extrapolated backflow infimum at one point")
    s.add_argument("--chi", type=float, required=True)
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--alpha-over-pi", type=float, default=None,
                   help="alpha/pi; if omitted, minimize over alpha")

    s = sub.add_parser("scan", parents=[common], help="infimum over an alpha/pi grid")
    s.add_argument("--chi", type=float, required=True)
    s.add_argument("--beta", default="0", help="beta value(s), comma list or start:stop:step")
    s.add_argument("--alpha-over-pi", default="0.01:1.5:0.01", help="alpha/pi grid")
    s.add_argument("--name", default="scan", help="CSV basename, e.g. fig2_a")

    s = sub.add_parser("global-min", parents=[common], help="minimize over chi, alpha, beta")
    s.add_argument("--chi", default="0.05:2.0:0.025", help="chi grid")
    s.add_argument("--beta", default=",".join(f"{-0.1 * k:g}" for k in range(10)),
                   help="beta values checked at the optimum")

    s = sub.add_parser("massless", parents=[common], help="large-chi estimates")
    s.add_argument("--chi", default=",".join(f"{c:g}" for c in TABLE1_CHIS))

    s = sub.add_parser("current", parents=[common], help="current of the maximizing state")
    s.add_argument("--chi", type=float, default=0.73)
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--alpha-over-pi", type=float, default=0.36252)
    s.add_argument("--points", type=int, default=1201, help="points on [-0.6, 0.6]")

    s = sub.add_parser("line", parents=[common], help="line-limit integral eigenproblem")
    s.add_argument("--eps", default="0.01", help="eps value(s)")
    s.add_argument("--z-max", type=float, default=20.0)
    s.add_argument("--n-nodes", type=int, default=400)
    s.add_argument("--extrapolate", action="store_true",
                   help="extrapolate in 1/z_max over the default cutoff schedule")
    return p


def _load_config(path):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"config {path} must hold a mapping")
    return {k.replace("-", "_"): v for k, v in data.items()}


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        defaults = _load_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(defaults) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


# ---------------------------------------------------------------- validation

def _check_ring(chi=None, beta=None, alpha_over_pi=None):
    try:
        RingParams(chi if chi is not None else 1.0,
                   beta if beta is not None else 0.0,
                   math.pi * alpha_over_pi if alpha_over_pi is not None else 1.0)
    except ParameterError as exc:
        raise InputError(str(exc)) from None


def schedule_of(args):
    if args.n_schedule:
        sched = resolve_schedule(_ints(args.n_schedule))
        if len(sched) < 4 or sched[0] < 50:
            raise InputError("--n-schedule needs >= 4 distinct sizes, all >= 50")
        return sched
    return resolve_schedule(args.profile)


# ---------------------------------------------------------------- outputs

def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o)}")


class Record:
    """Files produced by one run, as text, so cache hits reproduce them exactly."""

    def __init__(self, summary):
        self.summary = summary
        self.files = {}

    def add_csv(self, name, header, rows, meta):
        self.files[f"{name}.csv"] = _csv_text(header, rows)
        self.files[f"{name}.csv.meta.json"] = _json_text({"columns": list(header), **meta})

    def to_json(self):
        return {"summary": self.summary, "files": self.files}

    @classmethod
    def from_json(cls, data):
        rec = cls(data["summary"])
        rec.files = data["files"]
        return rec


def config_hash(command, inputs, schedule):
    payload = {"command": command, "inputs": inputs, "schedule": list(schedule),
               "schema": SCHEMA_VERSION, "code": __version__}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def cache_dir_of(args):
    if args.cache_dir:
        return Path(args.cache_dir)
    if os.environ.get(CACHE_ENV):
        return Path(os.environ[CACHE_ENV])
    return Path.home() / ".cache" / "diracbackflow"


# ---------------------------------------------------------------- commands

def cmd_two_mode(args, sched):
    from .two_mode import ALPHA_OVER_PI_GRID, minimize_two_mode, two_mode_curve, two_mode_min

    _check_ring(args.chi, args.beta, args.alpha_over_pi)
    if args.alpha_over_pi is not None:
        beta = 0.0 if args.beta is None else args.beta
        p = two_mode_min(RingParams.from_alpha_over_pi(args.chi, beta, args.alpha_over_pi), args.l1, args.l2)
        return Record({"chi": args.chi, "beta": beta, "alpha_over_pi": args.alpha_over_pi,
                       "l1": args.l1, "l2": args.l2, "p_min": p})
    betas = FIG1_BETAS if args.beta is None else (args.beta,)
    rows = two_mode_curve(args.chi, betas, ALPHA_OVER_PI_GRID, args.l1, args.l2)
    minima = []
    for beta in betas:
        ap, p = minimize_two_mode(args.chi, beta, args.l1, args.l2)
        minima.append({"beta": beta, "alpha_over_pi": ap, "p_min": p})
    best = min(minima, key=lambda m: m["p_min"])
    rec = Record({"chi": args.chi, "l1": args.l1, "l2": args.l2, "minima": minima,
                  "argmin": best, "p_min": best["p_min"]})
    rec.add_csv("fig1", ("alpha_over_pi", "beta", "chi", "p_min"), rows,
                {"chi": args.chi, "betas": list(betas)})
    return rec


def _extrapolation_json(res):
    fit = res.extrapolation
    return {"value_at_zero": fit.value_at_zero, "coeffs": list(fit.coeffs), "ssr": fit.ssr,
            "points": [list(p) for p in fit.points], "poor_fit": fit.poor_fit,
            "max_residual": max(p.residual for _, p in res.eigenpairs)}


def cmd_infimum(args, sched):
    from .extremal import backflow_infimum, minimize_alpha

    _check_ring(args.chi, args.beta, args.alpha_over_pi)
    if args.alpha_over_pi is None:
        ap, res = minimize_alpha(args.chi, args.beta, sched, workers=args.workers)
    else:
        ap = args.alpha_over_pi
        res = backflow_infimum(RingParams.from_alpha_over_pi(args.chi, args.beta, ap), sched,
                               workers=args.workers)
    return Record({"chi": args.chi, "beta": args.beta, "alpha_over_pi": ap,
                   "p_value": res.p_value, "extrapolation": _extrapolation_json(res)})


def cmd_scan(args, sched):
    from .extremal import scan_alpha

    grid = parse_grid(args.alpha_over_pi)
    betas = parse_grid(args.beta)
    for b in betas:
        _check_ring(args.chi, b, min(grid))
    rows, errors = [], {}
    for b in betas:
        surf = scan_alpha(args.chi, b, grid, sched, workers=args.workers)
        rows.extend(surf.rows())
        errors.update({f"beta={b},i={i}": e for i, e in surf.errors.items()})
    valid = [r for r in rows if not math.isnan(r[-1])]
    best = min(valid, key=lambda r: r[-1]) if valid else None
    rec = Record({"chi": args.chi, "betas": betas, "n_points": len(rows), "errors": errors,
                  "argmin": None if best is None else dict(zip(("alpha_over_pi", "beta", "chi", "p_value"), best))})
    rec.add_csv(args.name, ("alpha_over_pi", "beta", "chi", "p_value"), rows,
                {"chi": args.chi, "schedule": list(sched)})
    return rec


def cmd_global_min(args, sched):
    from .extremal import global_minimum

    chis = parse_grid(args.chi)
    betas = parse_grid(args.beta)
    for c in chis:
        _check_ring(c, None, None)
    for b in betas:
        _check_ring(None, b, None)
    g = global_minimum(chis, sched, beta_grid=betas, workers=args.workers)
    rows = [(c, ap, p) for c, ap, p in g.curve.meta["refined"]]
    rec = Record({"chi": g.chi, "alpha_over_pi": g.alpha_over_pi, "beta": g.beta, "p_value": g.p_value,
                  "beta_check": [dict(zip(("beta", "alpha_over_pi", "p_value"), t)) for t in g.beta_check]})
    rec.add_csv("fig3", ("chi", "alpha_over_pi", "p_value"), rows, {"schedule": list(sched), "beta": 0.0})
    return rec


def cmd_massless(args, sched):
    from .extremal import massless_estimates

    chis = parse_grid(args.chi)
    for c in chis:
        _check_ring(c, None, None)
    rows = massless_estimates(chis, sched, workers=args.workers)
    rec = Record({"rows": [dict(zip(("chi", "alpha_over_pi", "p_value"), r)) for r in rows]})
    rec.add_csv("table1", ("chi", "alpha_over_pi", "p_value"), rows, {"schedule": list(sched), "beta": 0.0})
    return rec


def cmd_current(args, sched):
    from .current import ZOOM_GRID, current_trace, window_integral
    from .extremal import backflow_infimum

    _check_ring(args.chi, args.beta, args.alpha_over_pi)
    if args.points < 3:
        raise InputError("--points must be >= 3")
    params = RingParams.from_alpha_over_pi(args.chi, args.beta, args.alpha_over_pi)
    res = backflow_infimum(params, sched, workers=args.workers)
    trace = current_trace(res, np.linspace(-0.6, 0.6, args.points))
    zoom = current_trace(res, ZOOM_GRID)
    try:
        integral = window_integral(trace)
    except ParameterError:
        integral = None
    meta = {"chi": args.chi, "beta": args.beta, "alpha_over_pi": args.alpha_over_pi,
            "n_max": res.n_max, "coeff_cutoff": 0.0}
    rec = Record({**meta, "p_value": res.p_value, "lambda_min_at_n_max": res.eigenpairs[-1][1].value,
                  "window_integral": integral})
    rec.add_csv("fig4a", ("t_over_T", "j_times_T"), trace.rows(), meta)
    rec.add_csv("fig4b", ("t_over_T", "j_times_T"), zoom.rows(), meta)
    return rec


def cmd_line(args, sched):
    from .line import LineParams, line_infimum, line_min_eig

    rows, out = [], []
    rule = "panels" if args.extrapolate else "legendre"
    for eps in parse_grid(args.eps):
        try:
            lp = LineParams(eps, args.z_max, args.n_nodes)
        except ParameterError as exc:
            raise InputError(str(exc)) from None
        if args.extrapolate:
            r = line_infimum(eps)
            for zm, n, v in r.table:
                rows.append((eps, v, n, zm))
            out.append({"eps": eps, "lambda_min": r.value, "ssr": r.extrapolation.ssr,
                        "z_max": "extrapolated"})
        else:
            v = line_min_eig(lp, check_convergence=False)
            rows.append((eps, v, args.n_nodes, args.z_max))
            out.append({"eps": eps, "lambda_min": v, "z_max": args.z_max, "n_nodes": args.n_nodes})
    rec = Record({"results": out})
    rec.add_csv("line", ("eps", "lambda_min", "nodes", "zmax"), rows, {"rule": rule})
    return rec


COMMANDS = {
    "two-mode": cmd_two_mode,
    "infimum": cmd_infimum,
    "scan": cmd_scan,
    "global-min": cmd_global_min,
    "massless": cmd_massless,
    "current": cmd_current,
    "line": cmd_line,
}
_NOT_INPUTS = {"command", "config", "out", "cache_dir", "no_cache", "workers", "verbose", "profile",
               "n_schedule", "seed"}


def run(args) -> int:
    out = Path(args.out)
    try:
        sched = schedule_of(args)
        inputs = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_INPUTS}
        key = config_hash(args.command, inputs, sched)
        cache_file = cache_dir_of(args) / f"{key}.json"
        t0 = time.time()
        if not args.no_cache and cache_file.exists():
            rec = Record.from_json(json.loads(cache_file.read_text()))
            cached = True
        else:
            rec = COMMANDS[args.command](args, sched)
            rec.summary = {"command": args.command, "config_hash": key, "inputs": inputs,
                           "schedule": list(sched), "schema_version": SCHEMA_VERSION,
                           "elapsed_s": round(time.time() - t0, 3), "results": rec.summary}
            cached = False
            if not args.no_cache:
                cache_file.parent.mkdir(parents=True, exist_ok=True)
                tmp = cache_file.with_suffix(".tmp")
                tmp.write_text(json.dumps(rec.to_json()))
                tmp.replace(cache_file)
        out.mkdir(parents=True, exist_ok=True)
        summary_name = f"{args.command.replace('-', '_')}.json"
        (out / summary_name).write_text(_json_text(rec.summary))
        for name, text in rec.files.items():
            (out / name).write_text(text)
        log.info("%s done in %.2fs (cache %s)", args.command, time.time() - t0, "hit" if cached else "miss")
        sys.stdout.write(_json_text(rec.summary))
        return EXIT_OK
    except (InputError, ParameterError, ValueError) as exc:
        return _fail(out, EXIT_BAD_INPUT, "bad_input", exc)
    except (EigenSolverError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return _fail(out, EXIT_NUMERICAL, "numerical_failure", exc)


def _fail(out, code, kind, exc):
    err = {"error": kind, "message": str(exc), "exit_code": code,
           "hint": "beta must lie in (-1, 0] (shift beta by integers), chi > 0, alpha > 0"
           if code == EXIT_BAD_INPUT else None}
    diag = getattr(exc, "diagnostics", None)
    if diag:
        err["diagnostics"] = diag
    sys.stderr.write(_json_text(err))
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "error.json").write_text(_json_text(err))
    except OSError:
        pass
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except InputError as exc:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--out", default=".")
        return _fail(Path(pre.parse_known_args(argv)[0].out), EXIT_BAD_INPUT, "bad_input", exc)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
