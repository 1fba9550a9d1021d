"""Reference error tables and figure grids, re-evaluated from scratch.

``TABLES`` holds the printed absolute errors (exact minus approximation)
verbatim, keyed by measure, then by the varied reneging rate, then
by server count.  A computed cell matches when it prints identically in the
same three-significant-figure format.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .approx import approx_measures
from .exact import exact_measures
from .model import INF, ModelParams
from .report import SweepSpec, param_fields

SERVER_COUNTS = (20, 30, 40, 50, 60, 70)
MEASURES = ("p_q", "p_a", "l")

TABLE2 = {
    "base": dict(lam=50.0, mu=1.0, n1=10, n2=20, theta1=None, theta2=2.0),
    "axis": "theta1",
    "abs": {
        "p_q": {0.2: "4.25E-06 3.83E-04 4.05E-03 -7.86E-03 5.83E-03 1.76E-03",
                2.0: "4.96E-04 3.81E-03 -1.11E-03 -1.10E-02 3.69E-03 1.50E-03",
                20.0: "-6.09E-03 -1.82E-02 -2.52E-02 -1.55E-02 4.97E-04 9.20E-04"},
        "p_a": {0.2: "-2.36E-07 -2.46E-05 -4.97E-04 1.06E-04 4.27E-04 2.49E-05",
                2.0: "-3.27E-05 -4.09E-04 -1.16E-03 7.15E-05 9.54E-04 1.29E-04",
                20.0: "-2.61E-03 -3.02E-03 -2.37E-03 1.28E-04 1.74E-03 3.62E-04"},
        "l": {0.2: "-6.54E-02 -2.54E-02 2.73E-02 -6.07E-02 4.55E-02 4.96E-03",
              2.0: "-1.97E-02 -1.21E-02 -2.92E-02 1.79E-03 2.39E-02 3.23E-03",
              20.0: "-6.50E-03 -7.55E-03 -5.91E-03 3.20E-04 4.36E-03 9.05E-04"},
    },
    "rel": {
        "p_q": {0.2: "0.00% 0.04% 0.41% -1.26% 5.47% 37.80%",
                2.0: "0.05% 0.39% -0.13% -2.52% 4.53% 36.92%",
                20.0: "-0.69% -2.54% -5.24% -7.09% 1.10% 34.52%"},
        "p_a": {0.2: "0.00% -0.01% -0.25% 0.24% 17.32% 49.66%",
                2.0: "-0.01% -0.10% -0.55% 0.11% 11.79% 44.95%",
                20.0: "-0.43% -0.73% -1.01% 0.14% 10.66% 42.75%"},
        "l": {0.2: "-0.28% -0.14% 0.21% -1.32% 11.12% 45.94%",
              2.0: "-0.13% -0.12% -0.56% 0.11% 11.79% 44.95%",
              20.0: "-0.43% -0.73% -1.01% 0.14% 10.66% 42.75%"},
    },
}

TABLE3 = {
    "base": dict(lam=50.0, mu=1.0, n1=5, n2=20, theta1=2.0, theta2=None),
    "axis": "theta2",
    "abs": {
        "p_q": {0.2: "1.31E-05 8.05E-04 -6.64E-04 -8.38E-03 4.37E-03 1.62E-03",
                2.0: "5.04E-04 3.80E-03 -1.13E-03 -1.10E-02 3.69E-03 1.50E-03",
                20.0: "6.53E-03 1.11E-02 -2.01E-03 -1.45E-02 2.29E-03 1.43E-03"},
        "p_a": {0.2: "-7.46E-07 -6.29E-05 -6.63E-04 -1.76E-04 7.98E-04 7.92E-05",
                2.0: "-3.32E-05 -4.09E-04 -1.16E-03 7.17E-05 9.54E-04 1.29E-04",
                20.0: "-4.78E-04 -1.32E-03 -1.71E-03 3.96E-04 1.28E-03 1.58E-04"},
        "l": {0.2: "4.51E-01 2.84E-01 -1.04E-01 5.59E-02 3.28E-02 -1.15E-02",
              2.0: "-6.81E-02 -2.91E-02 -3.09E-02 1.72E-03 2.39E-02 3.23E-03",
              20.0: "9.15E-02 2.98E-02 -5.59E-02 -4.60E-02 9.98E-03 2.64E-03"},
    },
    "rel": {
        "p_q": {0.2: "0.00% 0.08% -0.07% -1.80% 5.22% 39.69%",
                2.0: "0.05% 0.38% -0.13% -2.52% 4.53% 36.92%",
                20.0: "0.66% 1.17% -0.26% -3.69% 2.99% 36.13%"},
        "p_a": {0.2: "0.00% -0.02% -0.32% -0.28% 10.47% 28.82%",
                2.0: "-0.01% -0.10% -0.55% 0.11% 11.79% 44.95%",
                20.0: "-0.08% -0.33% -0.79% 0.56% 13.91% 47.70%"},
        "l": {0.2: "1.96% 1.43% -1.01% 2.46% 14.43% -152.68%",
              2.0: "-0.46% -0.29% -0.59% 0.10% 11.79% 44.95%",
              20.0: "1.65% 0.68% -2.02% -4.31% 6.31% 41.79%"},
    },
}

TABLES = {"table2": TABLE2, "table3": TABLE3}

TABLE_COLUMNS = ["lambda", "mu", "s", "n1", "n2", "theta1", "theta2", "measure",
                 "exact", "approx", "abs_error", "rel_error", "printed_abs",
                 "printed_rel", "match", "rel_match"]


def sci3(x: float) -> str:
    """Three significant figures in the tables' ``1.23E-04`` style."""
    return f"{x:.2E}"


def pct2(x: float) -> str:
    return f"{100.0 * x:.2f}%"


@dataclass(frozen=True)
class TableReport:
    rows: list
    cells: int
    matched: int
    max_deviation: float      # largest |computed - printed| over all cells

    @property
    def passed(self) -> bool:
        return self.matched == self.cells


def reproduce_table(name: str) -> TableReport:
    table = TABLES[name]
    axis = table["axis"]
    rows = []
    matched = 0
    worst = 0.0
    for measure in MEASURES:
        for rate, printed_line in table["abs"][measure].items():
            printed = printed_line.split()
            printed_rel = table["rel"][measure][rate].split()
            for s, p_abs, p_rel in zip(SERVER_COUNTS, printed, printed_rel):
                base = dict(table["base"], **{axis: rate})
                params = ModelParams(s=s, **base)
                ex = getattr(exact_measures(params), measure)
                ap = getattr(approx_measures(params), measure)
                err = ex - ap
                rel = err / ex
                ok = sci3(err) == p_abs
                matched += ok
                worst = max(worst, abs(err - float(p_abs)))
                row = param_fields(params)
                row.update(measure=measure, exact=ex, approx=ap, abs_error=err,
                           rel_error=rel, printed_abs=p_abs, printed_rel=p_rel,
                           match=int(ok), rel_match=int(pct2(rel) == p_rel))
                rows.append(row)
    return TableReport(rows, len(rows), matched, worst)


def _range(start, stop, step):
    n = int(round((stop - start) / step))
    return tuple(round(start + i * step, 10) for i in range(n + 1))


# axis1 = one line per value, axis2 = horizontal axis
FIGURES = {
    "fig3": SweepSpec(ModelParams(50.0, 1.0, 20, 10, 20, 2.0, 2.0),
                      ("theta1", (0.2, 2.0, 20.0)), ("s", tuple(range(20, 71)))),
    "fig4": SweepSpec(ModelParams(50.0, 1.0, 20, 5, 20, 2.0, 2.0),
                      ("theta2", (0.2, 2.0, 20.0)), ("s", tuple(range(20, 71)))),
    "fig5": SweepSpec(ModelParams(50.0, 1.0, 30, 0, 0, 2.0, 5.0),
                      ("n2", (0, 5, 10, 20, 40, INF)), ("n1", tuple(range(0, 31)))),
    "fig6": SweepSpec(ModelParams(50.0, 1.0, 30, 6, 20, 2.0, 2.0),
                      ("theta2", (0.2, 1.0, 2.0, 5.0, 20.0)), ("theta1", _range(0.5, 12.0, 0.5))),
    "fig7": SweepSpec(ModelParams(50.0, 1.0, 30, 0, INF, 4.0, 2.0),
                      ("n1", tuple(range(0, 13))),
                      ("theta2", (0.2, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 15.0, 20.0))),
}


def line_spread(rows: list, spec: SweepSpec, measure: str, route: str = "approx") -> list:
    """Max-minus-min of ``measure`` across the lines at each horizontal-axis value."""
    xs = spec.axis2[1]
    by_x = {x: [] for x in xs}
    key = spec.axis2[0]
    for row in rows:
        if row["route"] == route:
            by_x[row[key]].append(row[measure])
    return [max(v) - min(v) for v in (by_x[x] for x in xs)]


def is_non_increasing(values, slack: float = 1e-12) -> bool:
    return all(b <= a + slack for a, b in zip(values, values[1:]))

