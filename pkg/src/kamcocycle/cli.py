"""Command-line entry point.

Subcommands: check-freq, schedule, reduce, verify, lyapunov. Exit codes are
0 when every check passes, 2 for usage or configuration errors and 3 for
numerical failures. Failures print one JSON error record on stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import lab
from .config import ConfigError, RunConfig, parse_approx, parse_floats, parse_weight
from .fourier import MatrixSeries
from .io import read_series, write_series
from .kam import ReductionAborted, almost_reduce
from .weights import (PAPER_DELTA, PAPER_ZETA, brjuno_russmann_integral, build_schedule,
                      check_frequency)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
# small enough for the reference constants to leave a positive limit radius
DEFAULT_LOG_EPS0 = -1e5


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit_error(kind, message, code, out=None):
    rec = {"error": kind, "message": message, "exit": code}
    print(json.dumps(rec, sort_keys=True), file=sys.stderr)
    if out:
        with open(os.path.join(out, "error.json"), "w") as fh:
            json.dump(rec, fh, sort_keys=True)
            fh.write("\n")
    return code


def _fmt(x):
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# check-freq


def cmd_check_freq(args):
    omega = parse_floats(args.omega, name="--omega")
    psi = parse_approx(args.psi)
    kappa, worst = check_frequency(omega, psi, args.order)
    print(f"kappa_max = {_fmt(kappa)}")
    print(f"worst_k = {' '.join(map(str, worst))}")
    if args.min_kappa is not None and not kappa >= args.min_kappa:
        raise CheckFailed(f"kappa_max {kappa:.3e} below --min-kappa {args.min_kappa:g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# schedule


def cmd_schedule(args):
    lam, psi = parse_weight(args.weight), parse_approx(args.psi)
    if args.mode == "paper":
        delta, zeta = PAPER_DELTA, PAPER_ZETA
    else:
        delta, zeta = args.delta, args.zeta
    if args.log_eps0 is not None and args.eps0 is not None:
        raise UsageError("give at most one of --eps0 or --log-eps0")
    if args.eps0 is not None:
        log_eps0 = math.log(args.eps0)
    else:
        log_eps0 = DEFAULT_LOG_EPS0 if args.log_eps0 is None else args.log_eps0
    sched = build_schedule(args.r0, log_eps0, lam, psi, delta, zeta, k_max=args.k_max, kappa=args.kappa)
    br = brjuno_russmann_integral(lam, psi, 1.0)
    cols = ["k", "log_eps", "r", "log_N", "log_R", "log_kappa2", "log_decrement"]
    rows = [[rec.k, rec.log_eps, rec.r, rec.log_N, rec.log_R, rec.log_kappa2, rec.log_decrement]
            for rec in sched.records]
    w = csv.writer(sys.stdout)
    w.writerow(cols)
    for row in rows:
        w.writerow([row[0]] + [_fmt(x) for x in row[1:]])
    print(f"# brjuno_russmann_integral = {_fmt(br)}")
    print(f"# r_limit = {_fmt(sched.r_limit)}")
    print(f"# r_limit_bound = {_fmt(sched.r_limit_bound)}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            cw = csv.writer(fh)
            cw.writerow(cols)
            for row in rows:
                cw.writerow([row[0]] + [_fmt(x) for x in row[1:]])
    if not math.isfinite(br):
        raise CheckFailed("Brjuno-Russmann integral diverges")
    if sched.failed or not sched.r_limit > 0:
        raise CheckFailed(f"schedule exhausted at step {sched.failed_at}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# reduce


def _summary_rows(trace):
    out = []
    for s in trace.steps:
        out.append([s.k, _fmt(s.log_eps_before), _fmt(s.log_eps_after), _fmt(s.r), s.branch, _fmt(s.residual)])
    return out


def run_reduce(cfg, out_dir):
    """Run one configuration; returns (exit code, trace or None)."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "config.ini"), "w") as fh:
        fh.write(cfg.to_text())
    sc = cfg.step_config()
    A0 = cfg.A_matrix()
    F0 = cfg.perturbation()
    omega = list(cfg.system.omega)
    trace_path = os.path.join(out_dir, "trace.jsonl")
    try:
        trace = almost_reduce(A0, F0, cfg.system.r0, omega, sc)
    except ReductionAborted as exc:
        if exc.trace is not None:
            exc.trace.write_jsonl(trace_path)
        return _emit_error("ReductionAborted", str(exc), EXIT_NUMERIC, out_dir), exc.trace
    trace.write_jsonl(trace_path)
    st = trace.state
    write_series(os.path.join(out_dir, "Z.txt"), trace.Z)
    write_series(os.path.join(out_dir, "Z_inv.txt"), trace.Z_inv)
    write_series(os.path.join(out_dir, "psi.txt"), st.psi)
    write_series(os.path.join(out_dir, "F_bar.txt"), trace.F_bar)
    write_series(os.path.join(out_dir, "G.txt"), st.G)
    write_series(os.path.join(out_dir, "A_eps.txt"), MatrixSeries.constant(st.A, st.G.d))
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "log_eps_before", "log_eps_after", "r", "branch", "residual"])
        w.writerows(_summary_rows(trace))
    before = lab.CocycleSystem(A0, F0, omega)
    after = lab.CocycleSystem(st.A, st.G, omega)
    grid_res = lab.verify_conjugation(st.W, before, after, min(cfg.output.grid, _grid_cap(len(omega))))
    nA = float(np.abs(st.A).max())
    ok_steps = all(s.residual_ok for s in trace.steps)
    ok_grid = grid_res <= max(cfg.kam.residual_tol, 0.0) * 1e4 * (1 + nA)
    summary = {
        "outcome": trace.outcome, "steps": len(trace.steps),
        "log_eps_final": _fmt(st.log_eps) if math.isfinite(st.log_eps) else "-inf",
        "r_final": _fmt(st.r), "grid_residual": _fmt(grid_res),
        "residuals_ok": ok_steps and ok_grid,
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=1)
        fh.write("\n")
    print(f"{'k':>3} {'log_eps':>12} {'r':>10} {'branch':>12} {'residual':>10}")
    for s in trace.steps:
        print(f"{s.k:>3} {s.log_eps_after:>12.4f} {s.r_after:>10.4g} {s.branch:>12} {s.residual:>10.3e}")
    print(f"outcome: {trace.outcome}, grid residual {grid_res:.3e}")
    if not summary["residuals_ok"]:
        return _emit_error("ResidualCheck", f"residual checks failed (grid {grid_res:.3e})", EXIT_NUMERIC,
                           out_dir), trace
    return EXIT_OK, trace


def _grid_cap(d):
    return {1: 4096, 2: 128}.get(d, 16)


def _sweep_one(job):
    text, out_dir = job
    cfg = RunConfig.from_text(text)
    code, _ = run_reduce(cfg, out_dir)
    return code


def cmd_reduce(args):
    cfg = RunConfig.from_file(args.config)
    out = args.out or cfg.output.dir
    if not args.sweep:
        code, _ = run_reduce(cfg, out)
        return code
    key, _, values = args.sweep.partition("=")
    sec, _, name = key.partition(".")
    if not values or not name:
        raise UsageError("--sweep expects section.key=v1,v2,...")
    jobs = []
    for i, v in enumerate(values.split(",")):
        lines = cfg.to_text().splitlines()
        text = _set_key(lines, sec, name, v.strip())
        RunConfig.from_text(text)
        jobs.append((text, os.path.join(out, f"sweep_{i:03d}")))
    with ProcessPoolExecutor() as pool:
        codes = list(pool.map(_sweep_one, jobs))
    return max(codes)


def _set_key(lines, sec, name, value):
    out, cur, done = [], None, False
    for line in lines:
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            cur = s[1:-1]
        elif cur == sec and s.split("=", 1)[0].strip() == name:
            line, done = f"{name} = {value}", True
        out.append(line)
    if not done:
        raise UsageError(f"--sweep: no key {sec}.{name}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# verify and lyapunov


def _matrix_arg(text, name):
    return np.array(parse_floats(text, 4, name)).reshape(2, 2)


def cmd_verify(args):
    omega = parse_floats(args.omega, name="--omega")
    d = len(omega)
    A = _matrix_arg(args.A, "--A")
    F = read_series(args.F) if args.F else MatrixSeries.zero(d)
    A2 = _matrix_arg(args.A_after, "--A-after") if args.A_after else A
    F2 = read_series(args.F_after) if args.F_after else F
    Z = read_series(args.Z) if args.Z else MatrixSeries.identity(d)
    before, after = lab.CocycleSystem(A, F, omega), lab.CocycleSystem(A2, F2, omega)
    res = lab.verify_conjugation(Z, before, after, args.grid)
    print(f"residual = {_fmt(res)}")
    if args.csv:
        lab.write_csv(args.csv, [(args.grid, res)], header=("grid_n", "residual"))
    if not res <= args.tol:
        raise CheckFailed(f"residual {res:.3e} above {args.tol:g}")
    return EXIT_OK


def cmd_lyapunov(args):
    omega = parse_floats(args.omega, name="--omega")
    if args.schrodinger is not None:
        sysm = lab.schrodinger(args.schrodinger, omega, lam=args.lam)
    else:
        if args.A is None:
            raise UsageError("give --A or --schrodinger")
        F = read_series(args.F) if args.F else None
        sysm = lab.CocycleSystem(_matrix_arg(args.A, "--A"), F, omega)
    res = lab.lyapunov(sysm, args.T, args.samples, args.h, args.seed)
    print(f"lyapunov = {_fmt(res.mean)}")
    print(f"stderr = {_fmt(res.stderr)}")
    if args.csv:
        lab.write_csv(args.csv, lab.lab_rows(sysm, args.T, args.h, args.samples, args.seed))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="kamcocycle", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    q = sub.add_parser("check-freq", help="scan the arithmetic condition of a frequency vector")
    q.add_argument("--omega", required=True, help="comma or space separated entries")
    q.add_argument("--psi", default="power:2", help="power:<tau> or table:<path>")
    q.add_argument("--order", type=int, required=True)
    q.add_argument("--min-kappa", type=float, default=None, help="exit 3 when kappa_max is smaller")
    q.set_defaults(func=cmd_check_freq)

    q = sub.add_parser("schedule", help="print the r_k table; CSV columns: k, log_eps, r, log_N, "
                       "log_R, log_kappa2, log_decrement")
    q.add_argument("--r0", type=float, default=1.0)
    q.add_argument("--eps0", type=float)
    q.add_argument("--log-eps0", type=float, help=f"natural log of eps0 (default {DEFAULT_LOG_EPS0:g})")
    q.add_argument("--mode", choices=("paper", "practical"), default="paper")
    q.add_argument("--delta", type=float, default=1.1)
    q.add_argument("--zeta", type=float, default=0.01)
    q.add_argument("--kappa", type=float, default=1.0)
    q.add_argument("--weight", default="analytic", help="analytic, gevrey:<s> or table:<path>")
    q.add_argument("--psi", default="power:2")
    q.add_argument("--k-max", type=int, default=10)
    q.add_argument("--csv")
    q.set_defaults(func=cmd_schedule)

    q = sub.add_parser("reduce", help="run the reduction; writes trace.jsonl, series files, summary.csv")
    q.add_argument("--config", required=True)
    q.add_argument("--out", help="output directory (default: [output] dir)")
    q.add_argument("--sweep", help="section.key=v1,v2,... runs each value in its own subdirectory")
    q.set_defaults(func=cmd_reduce)

    q = sub.add_parser("verify", help="pointwise conjugation residual; CSV columns: grid_n, residual")
    q.add_argument("--omega", required=True)
    q.add_argument("--A", required=True, help="four entries, row major")
    q.add_argument("--F", help="series file of the perturbation")
    q.add_argument("--Z", help="series file of the conjugation (default identity)")
    q.add_argument("--A-after")
    q.add_argument("--F-after")
    q.add_argument("--grid", type=int, default=256)
    q.add_argument("--tol", type=float, default=1e-8)
    q.add_argument("--csv")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("lyapunov", help="Lyapunov exponent; CSV columns: theta, T, log_norm, rotation")
    q.add_argument("--omega", required=True)
    q.add_argument("--A")
    q.add_argument("--F")
    q.add_argument("--schrodinger", type=float, metavar="E")
    q.add_argument("--lam", type=float, default=1.0)
    q.add_argument("--T", type=float, default=100.0)
    q.add_argument("--h", type=float, default=0.01)
    q.add_argument("--samples", type=int, default=16)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--csv")
    q.set_defaults(func=cmd_lyapunov)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        return _emit_error("UsageError", str(exc), EXIT_USAGE)
    except (ConfigError, OSError) as exc:
        return _emit_error(type(exc).__name__, str(exc), EXIT_USAGE)
    except CheckFailed as exc:
        return _emit_error("CheckFailed", str(exc), EXIT_NUMERIC)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        return _emit_error(type(exc).__name__, str(exc), EXIT_NUMERIC)


if __name__ == "__main__":
    sys.exit(main())
