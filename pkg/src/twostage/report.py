"""Row evaluation and CSV / JSON-lines serialization for the command line."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .approx import approx_measures, approx_subchain_summary
from .errors import QueueModelError
from .exact import exact_measures, exact_subchain_summary
from .measures import ROUTES
from .model import ModelParams, ThreeStageParams
from .oracle import linear_measures, simulate

PARAM_COLUMNS = ["lambda", "mu", "s", "n1", "n2", "theta1", "theta2"]
THREE_STAGE_COLUMNS = ["n3", "theta3"]
RESULT_COLUMNS = [
    "route", "pi_s", "p_q", "p_a", "l",
    "h_tilde", "h1_tilde", "h2_tilde", "r1_tilde", "r2_tilde",
    "ci_pq", "ci_pa", "ci_l",
    "dominant", "clamped", "raw_p_q", "raw_p_a",
]
AXIS_NAMES = {"s": "s", "n1": "n1", "n2": "n2", "theta1": "theta1",
              "theta2": "theta2", "lambda": "lam", "mu": "mu"}


@dataclass(frozen=True)
class SimConfig:
    warmup: float = 100.0
    horizon: float = 1100.0
    seed: int = 0
    replications: int = 30


@dataclass(frozen=True)
class SweepSpec:
    base: ModelParams
    axis1: tuple = None          # (name, values)
    axis2: tuple = None
    routes: tuple = ("exact", "approx")
    sim: SimConfig = field(default_factory=SimConfig)

    def __post_init__(self):
        axes = [a for a in (self.axis1, self.axis2) if a is not None]
        names = [a[0] for a in axes]
        if len(set(names)) != len(names):
            raise QueueModelError("sweep axes must name distinct parameters")
        for name, values in axes:
            if name not in AXIS_NAMES:
                raise QueueModelError(f"unknown sweep parameter {name!r}")
            if not values:
                raise QueueModelError(f"axis {name!r} has no values")
        bad = [r for r in self.routes if r not in ROUTES]
        if bad or not self.routes:
            raise QueueModelError(f"unknown route(s): {bad}")

    def points(self) -> list:
        """Grid points, axis1 outer and axis2 inner; each validated on construction."""
        axes = [a for a in (self.axis1, self.axis2) if a is not None]
        out = []
        for combo in product(*(values for _, values in axes)):
            changes = {AXIS_NAMES[name]: v for (name, _), v in zip(axes, combo)}
            out.append(self.base.with_(**changes))
        return out


def fmt(value) -> str:
    """17 significant digits, ``inf`` for unbounded capacities, ints bare."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def parse_number(text: str):
    text = text.strip()
    if text.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return int(text)
    except ValueError:
        return float(text)


def param_fields(params: ModelParams) -> dict:
    row = dict(zip(PARAM_COLUMNS, (params.lam, params.mu, params.s, params.n1,
                                   params.n2, params.theta1, params.theta2)))
    if isinstance(params, ThreeStageParams):
        row.update(n3=params.n3, theta3=params.theta3)
    return row


def _clamp(x: float) -> tuple:
    return (min(max(x, 0.0), 1.0), not 0.0 <= x <= 1.0)


def evaluate(params: ModelParams, route: str, sim: SimConfig = SimConfig()) -> dict:
    """One output row (unformatted values) for ``params`` under ``route``."""
    row = param_fields(params)
    row["route"] = route
    summary = None
    ci = {}
    if route == "exact":
        m = exact_measures(params)
        summary = exact_subchain_summary(params)
    elif route == "approx":
        m = approx_measures(params)
        summary = approx_subchain_summary(params)
    elif route == "oracle-linear":
        m = linear_measures(params)
    elif route == "oracle-sim":
        est = simulate(params, sim.warmup, sim.horizon, sim.seed, sim.replications, threads=1)
        m = est.measures
        ci = est.half_widths
    else:
        raise QueueModelError(f"unknown route {route!r}")

    pi_s, p_q, p_a = m.pi_s, m.p_q, m.p_a
    clamped = False
    if route == "approx":
        (pi_s, c0), (p_q, c1), (p_a, c2) = _clamp(pi_s), _clamp(p_q), _clamp(p_a)
        clamped = c0 or c1 or c2
    row.update(pi_s=pi_s, p_q=p_q, p_a=p_a, l=m.l)
    if summary is not None:
        row.update(h_tilde=summary.inv_pi_s0, h1_tilde=summary.h1, h2_tilde=summary.h2,
                   r1_tilde=summary.r1, r2_tilde=summary.r2, dominant=summary.dominant())
    row.update(ci_pq=ci.get("p_q"), ci_pa=ci.get("p_a"), ci_l=ci.get("l"))
    row.update(clamped=int(clamped), raw_p_q=m.p_q, raw_p_a=m.p_a)
    return row


def columns_for(rows: Sequence[dict]) -> list:
    three = any("n3" in r for r in rows)
    return PARAM_COLUMNS + (THREE_STAGE_COLUMNS if three else []) + RESULT_COLUMNS


def _eval_args(args):
    return evaluate(*args)


def run_sweep(spec: SweepSpec, threads: int = 1) -> list:
    """Evaluate every (point, route) pair; rows come back in grid order."""
    jobs = [(p, r, spec.sim) for p in spec.points() for r in spec.routes]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_eval_args, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    return [evaluate(*j) for j in jobs]


def write_csv(rows: Sequence[dict], stream, columns: Iterable[str] | None = None):
    columns = list(columns) if columns is not None else columns_for(rows)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in columns])


def _json_value(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def write_jsonl(rows: Sequence[dict], stream, columns: Iterable[str] | None = None):
    columns = list(columns) if columns is not None else columns_for(rows)
    for row in rows:
        obj = {c: _json_value(row.get(c)) for c in columns}
        stream.write(json.dumps(obj) + "\n")


def render(rows: Sequence[dict], as_json: bool = False, columns=None) -> str:
    buf = io.StringIO()
    (write_jsonl if as_json else write_csv)(rows, buf, columns)
    return buf.getvalue()


_TEXT_COLUMNS = frozenset({"route", "dominant", "printed_abs", "printed_rel"})


def read_csv(text: str) -> list:
    """Parse CSV produced by :func:`write_csv`.

    Numeric cells come back as numbers, empty cells as ``None`` and anything
    else (route names, the dominant-subchain tag, printed table strings) as text.
    """
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in raw.items():
            if v == "":
                row[k] = None
            elif k in _TEXT_COLUMNS:
                row[k] = v
            else:
                try:
                    row[k] = parse_number(v)
                except ValueError:
                    row[k] = v
        rows.append(row)
    return rows


def params_from_row(row: dict) -> ModelParams:
    args = [row[c] for c in PARAM_COLUMNS]
    if row.get("n3") is not None:
        return ThreeStageParams(*args, n3=row["n3"], theta3=row["theta3"])
    return ModelParams(*args)
