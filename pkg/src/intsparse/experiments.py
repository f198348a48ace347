"""Seeded recovery experiments and the desk-scale table reproductions."""

from __future__ import annotations

import csv
import io
import json
import math
import random
import time
import warnings
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from .core import (ConstraintSet, Objective, RationalMatrix, RecoveryInstance, SetKind,
                   Status, format_rational, l0_norm, l1_norm, read_matrix)
from .milp import solve_instance, solve_milp
from .milp.builders import goodness_model_for

DEFAULT_TIME_LIMIT = 3600.0
MODES = ("recover", "goodness", "compare")


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a matrix source, a sparsity grid and what to run per grid point.

    ``mode`` is ``recover`` (solve for b = A x~ and compare with x~),
    ``goodness`` (uniform recovery test per s) or ``compare`` (the four
    P0/P1 integral/continuous solves side by side).
    """

    sparsities: tuple
    X: ConstraintSet
    mode: str = "recover"
    m: int | None = None
    n: int | None = None
    seed: int | None = None
    matrix_path: str | None = None
    objective: Objective = Objective.L0
    uniqueness: bool = False
    time_limit: float = DEFAULT_TIME_LIMIT
    binary_search: bool = False
    output: str | None = None
    name: str = "experiment"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.matrix_path is None:
            if self.m is None or self.n is None or self.seed is None:
                raise ValueError("random matrices need m, n and a seed")
            if self.X.n != self.n:
                raise ValueError("X dimension differs from n")
        if self.seed is None:
            raise ValueError("a seed is required (it also drives the signal generator)")
        object.__setattr__(self, "sparsities", tuple(int(s) for s in self.sparsities))
        n = self.X.n
        if any(not 0 <= s <= n for s in self.sparsities):
            raise ValueError(f"sparsities must lie in [0, {n}]")
        if self.time_limit <= 0:
            raise ValueError("time limit must be positive")


@dataclass
class ResultRow:
    s: int
    values: dict = field(default_factory=dict)
    recovered: bool | None = None
    unique: bool | None = None
    status: str = ""
    time: float = 0.0
    nodes: int = 0


# --------------------------------------------------------------------------
# instances
# --------------------------------------------------------------------------

def random_binary_matrix(m: int, n: int, seed: int) -> RationalMatrix:
    """i.i.d. fair-coin 0/1 entries; all-zero rows are redrawn."""
    rng = random.Random(seed)
    rows = []
    while len(rows) < m:
        row = [rng.randint(0, 1) for _ in range(n)]
        if any(row):
            rows.append(row)
    return RationalMatrix.from_rows(rows)


def matrix_for(spec: ExperimentSpec) -> RationalMatrix:
    if spec.matrix_path is not None:
        A = read_matrix(spec.matrix_path)
        if A.n != spec.X.n:
            raise ValueError("matrix width differs from the dimension of X")
        return A
    return random_binary_matrix(spec.m, spec.n, spec.seed)


def _value_choices(X: ConstraintSet, i: int) -> list:
    lo, hi = X.bounds()
    l = -1 if lo[i] is None else math.ceil(lo[i])
    u = 1 if hi[i] is None else math.floor(hi[i])
    return [v for v in range(l, u + 1) if v != 0]


def gen_instance(spec: ExperimentSpec, s: int, A: RationalMatrix | None = None) -> tuple:
    """(instance, x~) with x~ an s-sparse integral point of X and b = A x~.

    The support is uniform among s-subsets and each entry uniform over the
    nonzero integers of its range (+-1 on unbounded sides).  The signal
    generator is seeded by (seed, s) so every grid point is reproducible on
    its own.
    """
    if A is None:
        A = matrix_for(spec)
    n = A.n
    if not 0 <= s <= n:
        raise ValueError(f"sparsity {s} outside [0, {n}]")
    rng = random.Random(f"{spec.seed}-{s}")
    support = sorted(rng.sample(range(n), s))
    x = [Fraction(0)] * n
    for i in support:
        x[i] = Fraction(rng.choice(_value_choices(spec.X, i)))
    x = tuple(x)
    return RecoveryInstance(A, A.matvec(x), spec.X, spec.objective), x


# --------------------------------------------------------------------------
# running
# --------------------------------------------------------------------------

def _recover_row(spec, A, s) -> ResultRow:
    inst, xt = gen_instance(spec, s, A)
    start = time.perf_counter()
    res = solve_instance(inst, uniqueness=spec.uniqueness, time_limit=spec.time_limit)
    elapsed = time.perf_counter() - start
    row = ResultRow(s, status=res.status.value, time=elapsed, nodes=res.nodes_explored,
                    unique=res.unique)
    if res.solution is None:
        row.recovered = False
        return row
    x = res.solution
    if not inst.is_feasible(x):
        raise AssertionError(f"row s={s}: reported solution fails A x = b or x in X")
    row.values = {"value": res.value, "l0": l0_norm(x), "l1": l1_norm(x)}
    if res.status is Status.OPTIMAL:
        if spec.objective is Objective.L0:
            row.recovered = res.value == l0_norm(xt)
        else:
            row.recovered = x == xt
    else:
        row.recovered = False
    return row


def _goodness_row(spec, A, s) -> ResultRow:
    model = goodness_model_for(spec.X, A, s)
    start = time.perf_counter()
    # any positive objective already refutes goodness
    res = solve_milp(model, cutoff=1, time_limit=spec.time_limit)
    elapsed = time.perf_counter() - start
    row = ResultRow(s, time=elapsed, nodes=res.nodes_explored)
    best = res.value
    if best is None:
        # only the zero pair exists when the search ran to completion
        good = True if res.status is Status.INFEASIBLE else None
        best = Fraction(0) if good else None
    elif best > 0:
        good = False
    else:
        good = True if res.status is Status.OPTIMAL else None
    row.values = {"best_objective": best}
    row.recovered = good
    row.status = {True: "good", False: "not-good", None: "inconclusive"}[good]
    return row


def _compare_row(spec, A, s) -> ResultRow:
    """P0 and P1 over the integral box and its real relaxation for one x~."""
    lo, hi = spec.X.bounds()
    Xz = ConstraintSet.box(lo, hi) if spec.X.kind is not SetKind.NONNEG_BOX_INTEGERS else spec.X
    Xr = ConstraintSet.real_box(lo, hi)
    inst, xt = gen_instance(replace(spec, X=Xz), s, A)
    row = ResultRow(s, status="optimal")
    total = 0.0
    for tag, X, obj in (("P0Z", Xz, Objective.L0), ("P0R", Xr, Objective.L0),
                        ("P1Z", Xz, Objective.L1), ("P1R", Xr, Objective.L1)):
        start = time.perf_counter()
        res = solve_instance(RecoveryInstance(A, inst.b, X, obj), time_limit=spec.time_limit)
        elapsed = time.perf_counter() - start
        total += elapsed
        row.nodes += res.nodes_explored
        if res.status is not Status.OPTIMAL:
            row.status = "inconclusive"
        x = res.solution
        row.values[f"{tag}_l0"] = None if x is None else l0_norm(x)
        row.values[f"{tag}_l1"] = None if x is None else l1_norm(x)
        row.values[f"{tag}_time"] = elapsed
    row.recovered = row.values["P0Z_l0"] == l0_norm(xt)
    row.time = total
    return row


_RUNNERS = {"recover": _recover_row, "goodness": _goodness_row, "compare": _compare_row}


def _threshold_rows(spec, A) -> list:
    """Binary search for the largest good s on the (sorted) grid."""
    grid = sorted(spec.sparsities)
    done = {}
    lo, hi = 0, len(grid) - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        row = done[grid[mid]] = _goodness_row(spec, A, grid[mid])
        if row.recovered is None:
            break
        if row.recovered:
            lo = mid + 1
        else:
            hi = mid - 1
    return [done[s] for s in grid if s in done]


def run_experiment(spec: ExperimentSpec, deterministic: bool = False) -> list:
    """Run every grid point in grid order; write CSV and JSON when ``spec.output`` is set."""
    A = matrix_for(spec)
    if spec.mode == "goodness" and spec.binary_search:
        rows = _threshold_rows(spec, A)
    else:
        runner = _RUNNERS[spec.mode]
        rows = [runner(spec, A, s) for s in spec.sparsities]
    if spec.output is not None:
        write_results(spec, rows, spec.output, deterministic)
    return rows


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _cell(v, deterministic: bool, is_time: bool = False) -> str:
    if v is None:
        return ""
    if is_time:
        return "-" if deterministic else f"{v:.1f}"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return format_rational(v)
    return str(v)


def _decimal(v) -> str:
    return "" if v is None else f"{float(v):.2f}"


# column name -> how to read it off a row
_LAYOUTS = {
    "I": [("s", lambda r: r.s), ("best objective", lambda r: r.values.get("best_objective")),
          ("time [s]", None)],
    "II": [("s", lambda r: r.s), ("value", lambda r: r.values.get("value")), ("time [s]", None)],
    "III": [("s", lambda r: r.s),
            ("P0Z l0", lambda r: r.values.get("P0Z_l0")), ("P0Z time [s]", "P0Z_time"),
            ("P0R l0", lambda r: r.values.get("P0R_l0")), ("P0R time [s]", "P0R_time"),
            ("P1Z l0", lambda r: r.values.get("P1Z_l0")),
            ("P1Z l1", lambda r: r.values.get("P1Z_l1")), ("P1Z time [s]", "P1Z_time"),
            ("P1R l0", lambda r: r.values.get("P1R_l0")),
            ("P1R l1", lambda r: _decimal(r.values.get("P1R_l1")))],
}


def table_csv(rows: list, layout: str, deterministic: bool) -> str:
    cols = _LAYOUTS[layout]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([name for name, _ in cols])
    for r in rows:
        out = []
        for _, get in cols:
            if get is None:
                out.append(_cell(r.time, deterministic, True))
            elif isinstance(get, str):
                out.append(_cell(r.values.get(get), deterministic, True))
            else:
                out.append(_cell(get(r), deterministic))
        w.writerow(out)
    return buf.getvalue()


def rows_csv(rows: list, deterministic: bool) -> str:
    """Generic layout: s, every value column, recovered, unique, status, time, nodes."""
    keys = []
    for r in rows:
        keys += [k for k in r.values if k not in keys]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", *keys, "recovered", "unique", "status", "time", "nodes"])
    for r in rows:
        vals = [_cell(r.values.get(k), deterministic, k.endswith("time")) for k in keys]
        w.writerow([r.s, *vals, _cell(r.recovered, deterministic), _cell(r.unique, deterministic),
                    r.status, _cell(r.time, deterministic, True),
                    "-" if deterministic else r.nodes])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, (Objective, SetKind, Status)):
        return v.value
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def metadata(spec: ExperimentSpec) -> dict:
    return {
        "name": spec.name,
        "mode": spec.mode,
        "matrix": spec.matrix_path or {"random_binary": [spec.m, spec.n], "seed": spec.seed},
        "X": spec.X.describe(),
        "objective": spec.objective.value,
        "sparsities": list(spec.sparsities),
        "uniqueness": spec.uniqueness,
        "time_limit": spec.time_limit,
        "signal_model": "uniform s-subset support; entries uniform over the nonzero "
                        "integers of each coordinate's range; generator seeded by '<seed>-<s>'",
    }


def results_json(spec: ExperimentSpec, rows: list, deterministic: bool) -> str:
    out_rows = []
    for r in rows:
        d = asdict(r)
        if deterministic:
            d["time"] = None
            d["nodes"] = None
            d["values"] = {k: (None if k.endswith("time") else v) for k, v in d["values"].items()}
        out_rows.append(_jsonable(d))
    return json.dumps({"meta": metadata(spec), "rows": out_rows}, indent=2, sort_keys=True) + "\n"


def write_results(spec: ExperimentSpec, rows: list, output, deterministic: bool,
                  layout: str | None = None) -> tuple:
    """Write ``<output>.csv`` and ``<output>.json``; returns both paths."""
    base = Path(output)
    if base.suffix in (".csv", ".json"):
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    text = table_csv(rows, layout, deterministic) if layout else rows_csv(rows, deterministic)
    csv_path, json_path = base.with_suffix(".csv"), base.with_suffix(".json")
    csv_path.write_text(text)
    json_path.write_text(results_json(spec, rows, deterministic))
    return csv_path, json_path


# --------------------------------------------------------------------------
# table reproductions
# --------------------------------------------------------------------------

def table_spec(table: str, scale: str = "desk", seed: int | None = None,
               time_limit: float = DEFAULT_TIME_LIMIT, output: str | None = None) -> ExperimentSpec:
    """Experiment spec for one of the three tables at desk or original scale."""
    if table not in ("I", "II", "III"):
        raise ValueError("table must be I, II or III")
    if scale not in ("desk", "paper"):
        raise ValueError("scale must be desk or paper")
    desk = scale == "desk"
    if table == "I":
        m, n = (12, 24) if desk else (32, 64)
        grid = range(0, 13) if desk else range(10, 19)
        X, mode, uniq = ConstraintSet.binary(n), "goodness", False
    elif table == "II":
        m, n = (64, 128) if desk else (512, 1024)
        grid = range(5, 61, 5) if desk else [*range(25, 1024, 25), 1024]
        X, mode, uniq = ConstraintSet.binary(n), "recover", True
    else:
        m, n = (16, 32) if desk else (32, 64)
        grid = range(2, 17, 2) if desk else range(12, 65, 4)
        X, mode, uniq = ConstraintSet.nonneg_box(2, n), "compare", False
    seed = {"I": 1, "II": 2, "III": 3}[table] if seed is None else seed
    return ExperimentSpec(sparsities=tuple(grid), X=X, mode=mode, m=m, n=n, seed=seed,
                          uniqueness=uniq, time_limit=time_limit, output=output,
                          name=f"table-{table}-{scale}")


def reproduce(table: str, scale: str = "desk", seed: int | None = None,
              time_limit: float = DEFAULT_TIME_LIMIT, output: str | None = None,
              deterministic: bool = False) -> tuple:
    """Run a table reproduction; returns ``(rows, csv_text)`` in the table's column layout."""
    spec = table_spec(table, scale, seed, time_limit, None)
    if scale == "paper":
        warnings.warn(f"table {table} at original scale can take hours or days per row "
                      "with an exact-arithmetic solver", RuntimeWarning, stacklevel=2)
    rows = run_experiment(spec, deterministic)
    if output is not None:
        write_results(replace(spec, output=output), rows, output, deterministic, layout=table)
    return rows, table_csv(rows, table, deterministic)
