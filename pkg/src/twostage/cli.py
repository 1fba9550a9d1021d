"""Command line front end: ``twostage {measures,sweep,reproduce,rule,simulate}``.

Exit codes: 0 success, 1 a reproduced table disagrees with the printed
values, 2 invalid parameters, 3 output path not writable.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import reproduce as rep
from .approx import approx_measures, capacity_rule
from .errors import QueueModelError
from .measures import ROUTES
from .model import ModelParams, ThreeStageParams
from .oracle import RNG_ALGORITHM, default_threads, simulate
from .report import (
    SimConfig,
    SweepSpec,
    evaluate,
    param_fields,
    parse_number,
    render,
    run_sweep,
)

EXIT_MISMATCH, EXIT_INVALID, EXIT_UNWRITABLE = 1, 2, 3


class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _capacity(text):
    v = parse_number(text)
    return v if v == math.inf else int(v) if float(v).is_integer() else v


def _add_params(p, *, need_n1=True, need_theta1=True):
    p.add_argument("--lambda", dest="lam", type=float, required=True, help="arrival rate")
    p.add_argument("--mu", type=float, required=True, help="per-server service rate")
    p.add_argument("--s", type=int, required=True, help="number of servers")
    p.add_argument("--n1", type=_capacity, required=need_n1, default=None,
                   help="first-stage capacity (integer or 'inf')")
    p.add_argument("--n2", type=_capacity, default=0, help="second-stage capacity")
    p.add_argument("--theta1", type=float, required=need_theta1, default=None,
                   help="first-stage reneging rate")
    p.add_argument("--theta2", type=float, default=None,
                   help="second-stage reneging rate (default: theta1)")
    p.add_argument("--n3", type=_capacity, default=None, help="third-stage capacity")
    p.add_argument("--theta3", type=float, default=None, help="third-stage reneging rate")


def _add_output(p):
    p.add_argument("--output", "-o", default=None, help="write here instead of stdout")
    p.add_argument("--json", action="store_true", help="JSON-lines instead of CSV")


def _add_sim(p):
    p.add_argument("--warmup", type=float, default=100.0,
                   help="simulated time discarded before tallying (default 100)")
    p.add_argument("--horizon", type=float, default=1100.0,
                   help="simulated time at which each replication stops (default 1100)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replications", type=int, default=30)


def _params(ns) -> ModelParams:
    theta2 = ns.theta2 if ns.theta2 is not None else ns.theta1
    if ns.n3 is not None or ns.theta3 is not None:
        return ThreeStageParams(ns.lam, ns.mu, ns.s, ns.n1, ns.n2, ns.theta1, theta2,
                                n3=ns.n3 if ns.n3 is not None else 0,
                                theta3=ns.theta3 if ns.theta3 is not None else theta2)
    return ModelParams(ns.lam, ns.mu, ns.s, ns.n1, ns.n2, ns.theta1, theta2)


def _sim_config(ns) -> SimConfig:
    return SimConfig(ns.warmup, ns.horizon, ns.seed, ns.replications)


def _routes(text):
    routes = tuple(r.strip() for r in text.split(",") if r.strip())
    bad = [r for r in routes if r not in ROUTES]
    if bad or not routes:
        raise argparse.ArgumentTypeError(f"unknown route(s) {bad}; choose from {', '.join(ROUTES)}")
    return routes


def _axis(text):
    name, _, values = text.partition("=")
    if not values:
        raise argparse.ArgumentTypeError("axis must look like name=v1,v2,...")
    return name.strip(), tuple(parse_number(v) for v in values.split(",") if v.strip())


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise _Exit(EXIT_UNWRITABLE, f"cannot write {path}: {exc}")


def cmd_measures(ns) -> int:
    params = _params(ns)
    rows = [evaluate(params, r, _sim_config(ns)) for r in ns.routes]
    _emit(render(rows, ns.json), ns.output)
    return 0


def cmd_sweep(ns) -> int:
    spec = SweepSpec(_params(ns), ns.axis1, ns.axis2, ns.routes, _sim_config(ns))
    rows = run_sweep(spec, ns.threads)
    _emit(render(rows, ns.json), ns.output)
    return 0


def cmd_reproduce(ns) -> int:
    name = ns.target
    if name in rep.TABLES:
        report = rep.reproduce_table(name)
        _emit(render(report.rows, ns.json, rep.TABLE_COLUMNS), ns.output)
        status = "PASS" if report.passed else "FAIL"
        print(f"{name}: {status} {report.matched}/{report.cells} cells match printed "
              f"precision; max |computed - printed| = {report.max_deviation:.3e}", file=sys.stderr)
        for row in report.rows:
            if not row["match"]:
                print(f"  mismatch {row['measure']} s={row['s']} theta1={row['theta1']} "
                      f"theta2={row['theta2']}: computed {rep.sci3(row['abs_error'])}, "
                      f"printed {row['printed_abs']}", file=sys.stderr)
        return 0 if report.passed else EXIT_MISMATCH
    spec = rep.FIGURES[name]
    rows = run_sweep(spec, ns.threads)
    _emit(render(rows, ns.json), ns.output)
    print(f"{name}: {len(rows)} rows ({spec.axis1[0]} x {spec.axis2[0]} x routes)", file=sys.stderr)
    return 0


def cmd_rule(ns) -> int:
    if (ns.n1 is None) == (ns.theta1 is None):
        raise _Exit(EXIT_INVALID, "QueueModelError: give exactly one of --n1 and --theta1")
    result = capacity_rule(ns.lam, ns.mu, ns.s, ns.z, theta1=ns.theta1, n1=ns.n1)
    params = ModelParams(ns.lam, ns.mu, ns.s, result.n1, ns.n2, result.theta1,
                         ns.theta2 if ns.theta2 is not None else result.theta1)
    m = approx_measures(params)
    row = param_fields(params)
    row.update(solve_for="n1" if ns.theta1 is not None else "theta1", z=ns.z,
               bound=result.bound, c1plus=result.c1plus, p_q=m.p_q, p_a=m.p_a, l=m.l)
    cols = list(param_fields(params)) + ["solve_for", "z", "bound", "c1plus", "p_q", "p_a", "l"]
    _emit(render([row], ns.json, cols), ns.output)
    return 0


def cmd_simulate(ns) -> int:
    params = _params(ns)
    est = simulate(params, ns.warmup, ns.horizon, ns.seed, ns.replications, threads=ns.threads)
    row = param_fields(params)
    m = est.measures
    row.update(route="oracle-sim", pi_s=m.pi_s, p_q=m.p_q, p_a=m.p_a, l=m.l,
               ci_pi_s=est.half_widths["pi_s"], ci_pq=est.half_widths["p_q"],
               ci_pa=est.half_widths["p_a"], ci_l=est.half_widths["l"],
               events=est.events, seed=est.seed, replications=ns.replications,
               warmup=ns.warmup, horizon=ns.horizon)
    cols = list(param_fields(params)) + ["route", "pi_s", "p_q", "p_a", "l", "ci_pi_s", "ci_pq",
                                         "ci_pa", "ci_l", "events", "seed", "replications",
                                         "warmup", "horizon"]
    _emit(render([row], ns.json, cols), ns.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twostage",
        description="Performance measures of a multi-server queue with two-stage reneging.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measures", help="evaluate one parameter set")
    _add_params(p)
    p.add_argument("--routes", type=_routes, default=("exact", "approx"),
                   help="comma list from exact, approx, oracle-linear, oracle-sim")
    _add_sim(p)
    _add_output(p)
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("sweep", help="evaluate a one- or two-axis parameter grid")
    _add_params(p)
    p.add_argument("--axis1", type=_axis, required=True, help="e.g. theta1=0.2,2,20")
    p.add_argument("--axis2", type=_axis, default=None, help="e.g. s=20,30,40")
    p.add_argument("--routes", type=_routes, default=("exact", "approx"),
                   help="comma list from exact, approx, oracle-linear, oracle-sim")
    p.add_argument("--threads", type=int, default=default_threads(),
                   help="worker processes (default: $TWOSTAGE_THREADS or 1)")
    _add_sim(p)
    _add_output(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="re-evaluate an embedded reference table or figure grid")
    p.add_argument("target", choices=sorted(rep.TABLES) + sorted(rep.FIGURES))
    p.add_argument("--threads", type=int, default=default_threads(),
                   help="worker processes (default: $TWOSTAGE_THREADS or 1)")
    _add_output(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("rule", help="size the first stage so that c1plus >= z")
    _add_params(p, need_n1=False, need_theta1=False)
    p.add_argument("--z", type=float, required=True, help="threshold in standard deviations")
    _add_output(p)
    p.set_defaults(func=cmd_rule)

    p = sub.add_parser("simulate", help=f"discrete-event simulation ({RNG_ALGORITHM})")
    _add_params(p)
    _add_sim(p)
    p.add_argument("--threads", type=int, default=default_threads(),
                   help="worker processes (default: $TWOSTAGE_THREADS or 1)")
    _add_output(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except QueueModelError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except _Exit as exc:
        print(str(exc), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
