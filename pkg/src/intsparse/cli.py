"""``intsparse`` command line.

Exit codes: 0 success or positive verdict, 1 negative verdict (check
commands), 2 usage error, 3 budget or time limit exceeded / inconclusive.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from . import experiments as ex
from .conditions import (NspQuery, NspVariant, Recoverability, delta_ary_decode,
                         delta_ary_matrix, indiv_recoverable, is_s_good_l0, is_s_good_l1,
                         nsp_check)
from .core import (BudgetExceeded, ConstraintSet, Objective, RationalMatrix, RecoveryInstance,
                   SetKind, Status, Support, as_vector, format_rational, read_matrix,
                   read_vector, vector_to_json)
from .linalg import (hermite_normal_form, is_totally_unimodular, is_unimodular,
                     spark_with_witness)
from .milp import solve_instance
from .milp.builders import MissingBounds
from .oracle import EnumerationBudget, brute_goodness, brute_kernel_points, brute_solve

OK, NEGATIVE, USAGE, LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument parsing helpers
# --------------------------------------------------------------------------

def _matrix(text: str) -> RationalMatrix:
    """A matrix file (.json or .csv) or inline rows like ``"2,3,6;1,0,1"``."""
    if os.path.exists(text):
        return read_matrix(text)
    try:
        return RationalMatrix.from_rows([r.split(",") for r in text.split(";") if r.strip()])
    except (ValueError, ZeroDivisionError) as err:
        raise UsageError(f"--matrix: {text!r} is neither a file nor inline rows ({err})")


def _vector(text: str) -> tuple:
    """A vector file or inline comma-separated rationals."""
    if os.path.exists(text):
        return read_vector(text)
    try:
        return as_vector(v for v in text.split(",") if v.strip())
    except (ValueError, ZeroDivisionError) as err:
        raise UsageError(f"{text!r} is neither a file nor a comma-separated vector ({err})")


def _bound(text: str | None, n: int):
    if text is None:
        return None
    vals = _vector(text)
    if len(vals) == 1:
        return vals * n
    if len(vals) != n:
        raise UsageError(f"bound of length {len(vals)} for {n} columns")
    return vals


def _int_list(text: str) -> list:
    """``"1,2,5"`` or a range ``"start:stop[:step]"`` (stop inclusive)."""
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(start, stop + 1, step))
    return [int(p) for p in text.split(",") if p.strip()]


def _constraint_set(args, n: int) -> ConstraintSet:
    kind = SetKind(args.set)
    lo, hi = _bound(args.lower, n), _bound(args.upper, n)
    try:
        if kind is SetKind.ALL_INTEGERS:
            return ConstraintSet.integers(n)
        if kind is SetKind.NONNEG_INTEGERS:
            return ConstraintSet.nonneg_integers(n)
        if kind is SetKind.NONNEG_REALS:
            return ConstraintSet.nonneg_reals(n)
        if kind is SetKind.ALL_REALS:
            return ConstraintSet.reals(n)
        if hi is None:
            raise UsageError(f"--set {kind.value} needs --upper")
        if kind is SetKind.SYMMETRIC_BOX_INTEGERS:
            return ConstraintSet.symmetric_box(hi)
        if kind is SetKind.NONNEG_BOX_INTEGERS:
            return ConstraintSet.nonneg_box(hi)
        if lo is None:
            raise UsageError(f"--set {kind.value} needs --lower")
        if kind is SetKind.BOX_INTEGERS:
            return ConstraintSet.box(lo, hi)
        return ConstraintSet.real_box(lo, hi)
    except ValueError as err:
        raise UsageError(str(err))


def _search_box(args, n: int):
    """Optional --box-lower/--box-upper pair for unbounded sets."""
    if args.box_lower is None and args.box_upper is None:
        return None
    if args.box_lower is None or args.box_upper is None:
        raise UsageError("give both --box-lower and --box-upper")
    return _bound(args.box_lower, n), _bound(args.box_upper, n)


def _emit(args, payload: dict):
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
        return
    for key in sorted(payload):
        val = payload[key]
        if isinstance(val, list):
            val = " ".join(json.dumps(v) if isinstance(v, list) else str(v) for v in val)
        print(f"{key},{val}")


def _rationals(x):
    return None if x is None else vector_to_json(x)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_solve(args) -> int:
    A = _matrix(args.matrix)
    b = _vector(args.rhs)
    X = _constraint_set(args, A.n)
    inst = RecoveryInstance(A, b, X, Objective(args.objective))
    box = _search_box(args, A.n)
    try:
        res = solve_instance(inst, bounds=box or "auto", uniqueness=args.unique,
                             time_limit=args.time_limit)
    except MissingBounds as err:
        raise UsageError(f"{err} (use --box-lower/--box-upper)")
    payload = {"status": res.status.value, "nodes": res.nodes_explored}
    if res.value is not None:
        payload["value"] = format_rational(res.value)
        payload["solution"] = _rationals(res.solution)
    if res.unique is not None:
        payload["unique"] = res.unique
    _emit(args, payload)
    return LIMIT if res.status in (Status.LIMIT, Status.FEASIBLE) else OK


def cmd_check_goodness(args) -> int:
    A = _matrix(args.matrix)
    X = _constraint_set(args, A.n)
    if args.objective == "l1":
        verdict = is_s_good_l1(A, args.sparsity, X)
    else:
        verdict = is_s_good_l0(A, args.sparsity, X, method=args.method)
    _emit(args, verdict.to_json())
    return OK if verdict.good else NEGATIVE


def cmd_check_nsp(args) -> int:
    A = _matrix(args.matrix)
    variant = NspVariant.NSP_PLUS if args.plus else NspVariant.NSP
    box = None
    if args.lower is not None or args.upper is not None:
        if args.lower is None or args.upper is None:
            raise UsageError("an NSP box needs both --lower and --upper")
        box = (_bound(args.lower, A.n), _bound(args.upper, A.n))
    if (args.order is None) == (args.support is None):
        raise UsageError("give exactly one of --order and --support")
    support = None if args.support is None else Support.of(_int_list(args.support))
    verdict = nsp_check(A, NspQuery(variant, box=box, support=support, order=args.order))
    _emit(args, verdict.to_json())
    return OK if verdict.good else NEGATIVE


def cmd_check_individual(args) -> int:
    A = _matrix(args.matrix)
    X = _constraint_set(args, A.n)
    try:
        verdict = indiv_recoverable(_vector(args.xhat), A, X,
                                    definitional=not args.sufficient_only)
    except ValueError as err:
        raise UsageError(str(err))
    _emit(args, verdict.to_json())
    return {Recoverability.RECOVERABLE: OK, Recoverability.NOT_RECOVERABLE: NEGATIVE,
            Recoverability.UNKNOWN: LIMIT}[verdict.status]


def cmd_spark(args) -> int:
    A = _matrix(args.matrix)
    k, w = spark_with_witness(A, max_columns=args.max_columns)
    payload = {"spark": "inf" if k == float("inf") else k}
    if w is not None:
        payload["witness"] = _rationals(w)
    _emit(args, payload)
    return OK


def cmd_unimodular(args) -> int:
    A = _matrix(args.matrix)
    ok = is_unimodular(A, max_columns=args.max_columns)
    _emit(args, {"unimodular": ok})
    return OK if ok else NEGATIVE


def cmd_tu(args) -> int:
    A = _matrix(args.matrix)
    ok = is_totally_unimodular(A, max_columns=args.max_columns)
    _emit(args, {"totally_unimodular": ok})
    return OK if ok else NEGATIVE


def cmd_hnf(args) -> int:
    A = _matrix(args.matrix)
    res = hermite_normal_form(A)
    _emit(args, {"H": [_rationals(r) for r in res.H.rows],
                 "U": [_rationals(r) for r in res.U.rows], "rank": res.rank})
    return OK


def cmd_delta_ary(args) -> int:
    u = [int(v) for v in _vector(args.upper)]
    A = delta_ary_matrix(u)
    payload = {"matrix": _rationals(A.rows[0])}
    if args.rhs is not None:
        b = _vector(args.rhs)
        payload["x"] = _rationals(delta_ary_decode(A, b[0], u))
    _emit(args, payload)
    return OK


def _spec_from_args(args, mode: str, sparsities) -> ex.ExperimentSpec:
    n = args.cols
    if args.matrix is not None:
        n = _matrix(args.matrix).n
    if n is None:
        raise UsageError("give --cols (with --rows) or --matrix")
    X = _constraint_set(args, n)
    try:
        return ex.ExperimentSpec(
            sparsities=tuple(sparsities), X=X, mode=mode, m=args.rows, n=n, seed=args.seed,
            matrix_path=args.matrix,
            objective=Objective(args.objective), uniqueness=getattr(args, "unique", False),
            time_limit=args.time_limit or ex.DEFAULT_TIME_LIMIT,
            binary_search=getattr(args, "binary_search", False),
            output=getattr(args, "output", None))
    except ValueError as err:
        raise UsageError(str(err))


def cmd_gen(args) -> int:
    spec = _spec_from_args(args, "recover", [args.sparsity])
    inst, xt = ex.gen_instance(spec, args.sparsity)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "A.csv").write_text(inst.A.to_csv())
    (out / "b.json").write_text(json.dumps(vector_to_json(inst.b)) + "\n")
    (out / "xtilde.json").write_text(json.dumps(vector_to_json(xt)) + "\n")
    _emit(args, {"matrix": str(out / "A.csv"), "rhs": str(out / "b.json"),
                 "xtilde": str(out / "xtilde.json")})
    return OK


def cmd_run(args) -> int:
    spec = _spec_from_args(args, args.mode, _int_list(args.grid))
    rows = ex.run_experiment(spec, deterministic=args.deterministic)
    if spec.output is None:
        sys.stdout.write(ex.rows_csv(rows, args.deterministic))
    return _rows_exit(rows)


def cmd_reproduce(args) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        rows, text = ex.reproduce(args.table, args.scale, seed=args.seed,
                                  time_limit=args.time_limit or ex.DEFAULT_TIME_LIMIT,
                                  output=args.output, deterministic=args.deterministic)
    if args.output is None:
        sys.stdout.write(text)
    return _rows_exit(rows)


def _rows_exit(rows) -> int:
    if any(r.status in ("inconclusive", Status.LIMIT.value, Status.FEASIBLE.value) for r in rows):
        return LIMIT
    return OK


def cmd_oracle(args) -> int:
    A = _matrix(args.matrix)
    budget = EnumerationBudget(max_points=args.max_points)
    if args.oracle_cmd == "kernel-points":
        box = _search_box(args, A.n)
        if box is None:
            raise UsageError("kernel-points needs --box-lower/--box-upper")
        pts = brute_kernel_points(A, box, budget)
        _emit(args, {"points": [_rationals(p) for p in pts]})
        return OK
    X = _constraint_set(args, A.n)
    box = _search_box(args, A.n)
    if args.oracle_cmd == "goodness":
        v = brute_goodness(A, args.sparsity, X, box, budget)
        payload = {"good": v.good}
        if v.pair is not None:
            payload["pair"] = [_rationals(p) for p in v.pair]
            payload["witness"] = _rationals(v.witness)
        _emit(args, payload)
        return OK if v.good else NEGATIVE
    inst = RecoveryInstance(A, _vector(args.rhs), X, Objective(args.objective))
    res = brute_solve(inst, box, budget)
    payload = {"status": res.status.value}
    if res.value is not None:
        payload.update(value=format_rational(res.value), unique=res.unique,
                       optima=[_rationals(x) for x in res.optima])
    _emit(args, payload)
    return OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_common(p, matrix=True, xset=True):
    if matrix:
        p.add_argument("--matrix", required=True, help="matrix file (.json/.csv) or 'a,b;c,d'")
    if xset:
        p.add_argument("--set", default="Z", choices=[k.value for k in SetKind],
                       help="signal set X")
        p.add_argument("--lower", help="lower bound: file, scalar or comma list")
        p.add_argument("--upper", help="upper bound: file, scalar or comma list")
    p.add_argument("--format", default="json", choices=["json", "csv"])


def _add_box(p):
    p.add_argument("--box-lower", help="search box lower bound for unbounded sets")
    p.add_argument("--box-upper", help="search box upper bound for unbounded sets")


def _add_experiment(p):
    p.add_argument("--matrix", help="matrix file instead of a random binary matrix")
    p.add_argument("--rows", type=int, help="rows of the random binary matrix")
    p.add_argument("--cols", type=int, help="columns of the random binary matrix")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--set", default="nnbox", choices=[k.value for k in SetKind])
    p.add_argument("--lower")
    p.add_argument("--upper", default="1")
    p.add_argument("--objective", default="l0", choices=["l0", "l1"])
    p.add_argument("--time-limit", type=float)
    p.add_argument("--format", default="csv", choices=["json", "csv"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intsparse",
                                     description="Exact sparse recovery of integer signals.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve P0/P1 exactly")
    _add_common(p)
    _add_box(p)
    p.add_argument("--rhs", required=True)
    p.add_argument("--objective", default="l0", choices=["l0", "l1"])
    p.add_argument("--unique", action="store_true", help="also certify uniqueness")
    p.add_argument("--time-limit", type=float)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check-goodness", help="uniform recovery test (s, X, 0/1)-good")
    _add_common(p)
    p.add_argument("--sparsity", type=int, required=True)
    p.add_argument("--objective", default="l0", choices=["l0", "l1"])
    p.add_argument("--method", default="auto", choices=["oracle", "milp", "auto"])
    p.set_defaults(func=cmd_check_goodness)

    p = sub.add_parser("check-nsp", help="nullspace property over Z^n or a box")
    _add_common(p, xset=False)
    p.add_argument("--lower", help="kernel box lower bound (omit for all of Z^n)")
    p.add_argument("--upper", help="kernel box upper bound")
    p.add_argument("--order", type=int)
    p.add_argument("--support", help="1-based indices, e.g. '1,3'")
    p.add_argument("--plus", action="store_true", help="check NSP+ instead of NSP")
    p.set_defaults(func=cmd_check_nsp)

    p = sub.add_parser("check-individual", help="is xhat the unique l1 minimiser?")
    _add_common(p)
    p.add_argument("--xhat", required=True)
    p.add_argument("--sufficient-only", action="store_true",
                   help="skip the exact fallback where only a sufficient test exists")
    p.set_defaults(func=cmd_check_individual)

    for name, func, helptext in (("spark", cmd_spark, "spark with a witness"),
                                 ("unimodular", cmd_unimodular, "unimodularity"),
                                 ("tu", cmd_tu, "total unimodularity")):
        p = sub.add_parser(name, help=helptext)
        _add_common(p, xset=False)
        p.add_argument("--max-columns", type=int, help="refuse wider matrices")
        p.set_defaults(func=func)

    p = sub.add_parser("hnf", help="Hermite normal form H = A U")
    _add_common(p, xset=False)
    p.set_defaults(func=cmd_hnf)

    p = sub.add_parser("delta-ary", help="delta-ary matrix for [0,u]_Z, optional decode")
    p.add_argument("--upper", required=True)
    p.add_argument("--rhs", help="decode this right-hand side")
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.set_defaults(func=cmd_delta_ary)

    p = sub.add_parser("gen", help="write a seeded instance (A, b, x~)")
    _add_experiment(p)
    p.add_argument("--sparsity", type=int, required=True)
    p.add_argument("--output", required=True, help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="run an experiment grid")
    _add_experiment(p)
    p.add_argument("--mode", default="recover", choices=list(ex.MODES))
    p.add_argument("--grid", required=True, help="'1,2,3' or 'start:stop[:step]'")
    p.add_argument("--unique", action="store_true")
    p.add_argument("--binary-search", action="store_true",
                   help="goodness mode: bisect for the largest good s")
    p.add_argument("--output", help="write <output>.csv and <output>.json")
    p.add_argument("--deterministic", action="store_true",
                   help="single-threaded, byte-stable output (times printed as '-')")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("reproduce", help="table I, II or III at desk or original scale")
    p.add_argument("--table", required=True, choices=["I", "II", "III"])
    p.add_argument("--scale", default="desk", choices=["desk", "paper"])
    p.add_argument("--seed", type=int)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--output")
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("oracle", help="brute-force reference answers")
    osub = p.add_subparsers(dest="oracle_cmd", required=True)
    for name in ("solve", "kernel-points", "goodness"):
        q = osub.add_parser(name)
        _add_common(q, xset=name != "kernel-points")
        _add_box(q)
        q.add_argument("--max-points", type=int, default=EnumerationBudget().max_points)
        if name == "solve":
            q.add_argument("--rhs", required=True)
            q.add_argument("--objective", default="l0", choices=["l0", "l1"])
        if name == "goodness":
            q.add_argument("--sparsity", type=int, required=True)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except UsageError as err:
        print(f"intsparse: {err}", file=sys.stderr)
        return USAGE
    except (BudgetExceeded, TimeoutError) as err:
        print(f"intsparse: {err}", file=sys.stderr)
        return LIMIT
    except ValueError as err:
        print(f"intsparse: {err}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
