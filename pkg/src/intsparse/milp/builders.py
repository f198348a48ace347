"""MILP encodings of the recovery problems and of the goodness tests."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from ..core import (ConstraintSet, Objective, RationalMatrix, RecoveryInstance,
                    SetKind, SolveResult, Status, as_vector, l1_norm)
from .bnb import solve_milp
from .model import LpModel
from .simplex import solve_lp


class MissingBounds(ValueError):
    """The signal set is unbounded and no finite box was supplied or derivable."""


class InfeasiblePoint(ValueError):
    """A point handed to :func:`add_uniqueness_cut` is not feasible for the model."""


# --------------------------------------------------------------------------
# bounds
# --------------------------------------------------------------------------

def implied_bounds(instance: RecoveryInstance) -> tuple:
    """A finite box containing every optimum of the instance, or raise MissingBounds.

    Nonnegative signals are capped row by row: a row with nonnegative
    entries bounds each variable with a positive coefficient by rhs/entry.
    For the l1 objective any feasible integral point ``x0`` caps every
    optimum by ``|x_i| <= ||x0||_1``.
    """
    from ..linalg import integral_solution

    A, b, X = instance.A, instance.b, instance.X
    lo, hi = (list(v) for v in X.bounds())
    nonneg = all(v is not None and v >= 0 for v in lo)
    if nonneg:
        for row, rhs in zip(A.rows, b):
            if all(a >= 0 for a in row) and rhs >= 0:
                for i, a in enumerate(row):
                    if a > 0:
                        cap = rhs / a
                        if X.is_integral:
                            cap = Fraction(math.floor(cap))
                        if hi[i] is None or cap < hi[i]:
                            hi[i] = cap
    if any(v is None for v in lo + hi) and instance.objective is Objective.L1:
        if X.kind is SetKind.ALL_INTEGERS:
            x0 = integral_solution(A, b)
            if x0 is None:
                # infeasible anyway; any box gives the right answer
                cap = Fraction(0)
            else:
                cap = l1_norm(x0)
            lo = [-cap if v is None else v for v in lo]
            hi = [cap if v is None else v for v in hi]
    if any(v is None for v in lo + hi):
        raise MissingBounds(
            f"cannot derive finite bounds for {X.describe()}; pass an explicit box")
    return tuple(lo), tuple(hi)


def _resolve_bounds(instance: RecoveryInstance, bounds) -> tuple:
    lo, hi = instance.X.bounds()
    if all(v is not None for v in lo + hi):
        return lo, hi
    if bounds is None:
        raise MissingBounds(
            f"{instance.X.describe()} is unbounded; supply bounds or use bounds='auto'")
    if bounds == "auto":
        return implied_bounds(instance)
    blo, bhi = bounds
    n = instance.A.n
    blo = as_vector([blo] * n if not isinstance(blo, (list, tuple)) else blo)
    bhi = as_vector([bhi] * n if not isinstance(bhi, (list, tuple)) else bhi)
    # intersect with X so a loose user box never enlarges the set
    lo = tuple(b if v is None else max(b, v) for b, v in zip(blo, lo))
    hi = tuple(b if v is None else min(b, v) for b, v in zip(bhi, hi))
    return lo, hi


def _int_rows(A: RationalMatrix, b=None):
    """Rows of A (and b) scaled row-wise to integers."""
    out = []
    for i, row in enumerate(A.rows):
        k = 1
        for v in row:
            k = math.lcm(k, v.denominator)
        if b is not None:
            k = math.lcm(k, Fraction(b[i]).denominator)
        out.append(([int(v * k) for v in row], None if b is None else Fraction(b[i]) * k))
    return out


# --------------------------------------------------------------------------
# recovery problems
# --------------------------------------------------------------------------

def build_p0(instance: RecoveryInstance, bounds=None) -> LpModel:
    """min ||x||_0 over {x in X : Ax = b} with support indicators.

    ``bounds`` is only consulted when X is unbounded: a ``(lower, upper)``
    pair (scalars or vectors) or ``"auto"`` for :func:`implied_bounds`.
    """
    A, b, X = instance.A, instance.b, instance.X
    n = A.n
    lo, hi = _resolve_bounds(instance, bounds)
    integral = X.is_integral
    model = LpModel(sense="min")
    if integral and all(l == 0 for l in lo) and all(u == 1 for u in hi):
        for i in range(n):
            model.add_var(f"x{i + 1}", 0, 1, integer=True, cost=1)
        for row, rhs in _int_rows(A, b):
            model.add_row(row, "==", rhs)
        model.signal = tuple((i, None) for i in range(n))
        return model
    for i in range(n):
        model.add_var(f"x{i + 1}", lo[i], hi[i], integer=integral)
    for i in range(n):
        model.add_var(f"y{i + 1}", 0, 1, integer=True, cost=1)
    for row, rhs in _int_rows(A, b):
        model.add_row(row + [0] * n, "==", rhs)
    for i in range(n):
        y = n + i
        if hi[i] > 0:
            model.add_row({i: 1, y: -hi[i]}, "<=", 0, name=f"up{i + 1}")
        if lo[i] < 0:
            model.add_row({i: 1, y: -lo[i]}, ">=", 0, name=f"lo{i + 1}")
    model.signal = tuple((i, None) for i in range(n))
    return model


def build_p1(instance: RecoveryInstance, bounds=None) -> LpModel:
    """min ||x||_1 over {x in X : Ax = b}; signed coordinates are split."""
    A, b, X = instance.A, instance.b, instance.X
    n = A.n
    integral = X.is_integral
    if integral or X.kind is SetKind.BOX_REALS:
        lo, hi = _resolve_bounds(instance, bounds)
    else:
        lo, hi = X.bounds()
    model = LpModel(sense="min")
    signal = []
    cols = []  # (var index, sign, signal coordinate)
    for i in range(n):
        up = hi[i]
        neg_room = None if lo[i] is None else -lo[i]
        if lo[i] is not None and lo[i] >= 0:
            j = model.add_var(f"x{i + 1}", lo[i], up, integer=integral, cost=1)
            signal.append((j, None))
            cols.append((j, 1, i))
            continue
        p = model.add_var(f"xp{i + 1}", 0, None if up is None else max(up, 0),
                          integer=integral, cost=1)
        q = model.add_var(f"xm{i + 1}", 0, neg_room, integer=integral, cost=1)
        signal.append((p, q))
        cols.append((p, 1, i))
        cols.append((q, -1, i))
    for row, rhs in _int_rows(A, b):
        coeffs = [0] * model.num_vars
        for j, sgn, i in cols:
            coeffs[j] = sgn * row[i]
        model.add_row(coeffs, "==", rhs)
    model.signal = tuple(signal)
    return model


def build_model(instance: RecoveryInstance, bounds=None) -> LpModel:
    if instance.objective is Objective.L0:
        return build_p0(instance, bounds)
    return build_p1(instance, bounds)


# --------------------------------------------------------------------------
# goodness models
# --------------------------------------------------------------------------

def _check_order(A: RationalMatrix, s: int):
    if not 0 <= s <= A.n:
        raise ValueError(f"sparsity {s} outside [0, {A.n}]")


def _pair_model(A: RationalMatrix, s: int, sense: str, vw_integer: bool) -> tuple:
    n = A.n
    model = LpModel(sense=sense)
    for i in range(n):
        model.add_var(f"v{i + 1}", 0, 1, integer=vw_integer, cost=1)
    for i in range(n):
        model.add_var(f"w{i + 1}", 0, 1, integer=vw_integer, cost=1)
    for row, _ in _int_rows(A):
        model.add_row(row + [-a for a in row], "==", 0)
    model.signal = tuple((i, n + i) for i in range(n))
    return model, n


def build_goodness_binary(A: RationalMatrix, s: int) -> LpModel:
    """max 1'v + 1'w over sign-split sparse binary kernel vectors; 0 iff good."""
    _check_order(A, s)
    model, n = _pair_model(A, s, "max", True)
    model.add_row([1] * n + [0] * n, "<=", s, name="card_v")
    model.add_row([0] * n + [1] * n, "<=", s, name="card_w")
    for i in range(n):
        model.add_row({i: 1, n + i: 1}, "<=", 1, name=f"disj{i + 1}")
    model.add_row([1] * n + [-1] * n, ">=", 0, name="sym")
    return model


def build_goodness_binary_alt(A: RationalMatrix, s: int) -> LpModel:
    """Feasibility form of :func:`build_goodness_binary`; infeasible iff good."""
    model = build_goodness_binary(A, s)
    model.sense = "min"
    model.add_row([1] * model.num_vars, ">=", 1, name="nonzero")
    return model


def build_goodness_unit_box(A: RationalMatrix, s: int) -> LpModel:
    """Goodness over [0,1]^n in the reals: continuous v, w gated by binary y, z."""
    _check_order(A, s)
    model, n = _pair_model(A, s, "max", False)
    ys = [model.add_var(f"y{i + 1}", 0, 1, integer=True) for i in range(n)]
    zs = [model.add_var(f"z{i + 1}", 0, 1, integer=True) for i in range(n)]
    for i in range(n):
        model.add_row({i: 1, ys[i]: -1}, "<=", 0, name=f"gate_v{i + 1}")
        model.add_row({n + i: 1, zs[i]: -1}, "<=", 0, name=f"gate_w{i + 1}")
        model.add_row({ys[i]: 1, zs[i]: 1}, "<=", 1, name=f"disj{i + 1}")
    model.add_row({y: 1 for y in ys}, "<=", s, name="card_y")
    model.add_row({z: 1 for z in zs}, "<=", s, name="card_z")
    model.add_row({**{i: 1 for i in range(n)}, **{n + i: -1 for i in range(n)}}, ">=", 0,
                  name="sym")
    return model


def build_goodness_real_box(A: RationalMatrix, s: int, lower, upper) -> LpModel:
    """Goodness over a real box [l, u] with l <= 0 <= u; maximum 0 iff good.

    Real kernel vectors scale freely, so only the sign pattern matters.  A
    coordinate with l < 0 < u counts once in the total, one with l = 0
    charges positive entries to the x-hat side and negative entries to the
    other side, and u = 0 the reverse.
    """
    _check_order(A, s)
    n = A.n
    lower, upper = _vec(lower, n), _vec(upper, n)
    if all(Fraction(v) == 0 for v in lower):
        return build_goodness_unit_box(A, s)
    model, _ = _pair_model(A, s, "max", False)
    ys = [model.add_var(f"y{i + 1}", 0, 1, integer=True) for i in range(n)]
    zs = [model.add_var(f"z{i + 1}", 0, 1, integer=True) for i in range(n)]
    hat_side, other_side = {}, {}
    for i in range(n):
        model.add_row({i: 1, ys[i]: -1}, "<=", 0, name=f"gate_v{i + 1}")
        model.add_row({n + i: 1, zs[i]: -1}, "<=", 0, name=f"gate_w{i + 1}")
        model.add_row({ys[i]: 1, zs[i]: 1}, "<=", 1, name=f"disj{i + 1}")
        if Fraction(lower[i]) == 0:
            hat_side[ys[i]], other_side[zs[i]] = 1, 1
        elif Fraction(upper[i]) == 0:
            hat_side[zs[i]], other_side[ys[i]] = 1, 1
    if hat_side:
        model.add_row(hat_side, "<=", s, name="card_hat")
    if other_side:
        model.add_row(other_side, "<=", s, name="card_other")
    model.add_row({**{y: 1 for y in ys}, **{z: 1 for z in zs}}, "<=", 2 * s, name="card_all")
    model.add_row({**{i: 1 for i in range(n)}, **{n + i: -1 for i in range(n)}}, ">=", 0,
                  name="sym")
    return model


REGIONS = ("S1+", "S2+", "S3+", "S4+", "S1-", "S2-", "S3-", "S4-")


def region_intervals(l, u) -> dict:
    """Integer interval [lo, hi] of each region for one coordinate (empty ones omitted)."""
    l, u = int(l), int(u)
    dmin, dmax = min(-l, u), max(-l, u)
    raw = {
        "S1+": (1, dmin), "S2+": (dmin + 1, u), "S3+": (u + 1, dmax), "S4+": (dmax + 1, u - l),
        "S1-": (-dmin, -1), "S2-": (l, -dmin - 1), "S3-": (-dmax, l - 1),
        "S4-": (l - u, -dmax - 1),
    }
    return {k: v for k, v in raw.items() if v[0] <= v[1]}


def build_goodness_general(A: RationalMatrix, s: int, lower, upper) -> LpModel:
    """Search for a nonzero integral kernel vector in C(l, u); infeasible iff good.

    Each coordinate picks exactly one of the zero value or a nonempty region
    interval via a binary indicator, which pins the coordinate to that
    interval; the three cardinality rows are linear in the indicators.
    """
    _check_order(A, s)
    n = A.n
    lower = [math.ceil(Fraction(v)) for v in _vec(lower, n)]
    upper = [math.floor(Fraction(v)) for v in _vec(upper, n)]
    model = LpModel(sense="min")
    for i in range(n):
        model.add_var(f"z{i + 1}", lower[i] - upper[i], upper[i] - lower[i], integer=True)
    zero_ind, region_ind = [], []
    for i in range(n):
        zero_ind.append(model.add_var(f"t0_{i + 1}", 0, 1, integer=True))
        inds = {}
        for name, span in region_intervals(lower[i], upper[i]).items():
            inds[name] = (model.add_var(f"t{name}_{i + 1}", 0, 1, integer=True), span)
        region_ind.append(inds)
    for row, _ in _int_rows(A):
        model.add_row({i: a for i, a in enumerate(row) if a}, "==", 0)
    for i in range(n):
        pick = {zero_ind[i]: 1}
        lo_row, hi_row = {i: 1}, {i: 1}
        for j, (a, b) in region_ind[i].values():
            pick[j] = 1
            lo_row[j] = -a
            hi_row[j] = -b
        model.add_row(pick, "==", 1, name=f"one_region{i + 1}")
        model.add_row(lo_row, ">=", 0, name=f"z_lo{i + 1}")
        model.add_row(hi_row, "<=", 0, name=f"z_hi{i + 1}")

    def count(weights):
        row = {}
        for inds in region_ind:
            for name, (j, _) in inds.items():
                w = weights.get(name[:2], 0)
                if w:
                    row[j] = w
        return row

    model.add_row(count({"S4": 1, "S3": 1}), "<=", s, name="card_43")
    model.add_row(count({"S4": 1, "S2": 1}), "<=", s, name="card_42")
    model.add_row(count({"S4": 2, "S3": 1, "S2": 1, "S1": 1}), "<=", 2 * s, name="card_all")
    model.add_row({j: 1 for j in zero_ind}, "<=", n - 1, name="nonzero")
    model.signal = tuple((i, None) for i in range(n))
    return model


def _vec(v, n):
    if isinstance(v, (int, Fraction, str)):
        return [v] * n
    return list(v)


# --------------------------------------------------------------------------
# uniqueness
# --------------------------------------------------------------------------

def pin_objective(model: LpModel, value) -> LpModel:
    out = model.copy()
    out.add_row(list(model.objective), "==", value, name="pin")
    return out


def _signal_range(model: LpModel, p, q):
    lo_p, hi_p = model.lower[p], model.upper[p]
    if q is None:
        return lo_p, hi_p
    lo_q, hi_q = model.lower[q], model.upper[q]
    lo = None if lo_p is None or hi_q is None else lo_p - hi_q
    hi = None if hi_p is None or lo_q is None else hi_p - lo_q
    return lo, hi


def _signal_expr(p, q) -> dict:
    return {p: 1} if q is None else {p: 1, q: -1}


def _fix_signal(model: LpModel, target) -> LpModel:
    out = model.copy()
    for k, ((p, q), t) in enumerate(zip(model.signal, target)):
        out.add_row(_signal_expr(p, q), "==", t, name=f"fix{k + 1}")
    return out


def add_uniqueness_cut(model: LpModel, xstar: Sequence, pin=None) -> LpModel:
    """Copy of ``model`` whose feasible set excludes every point with signal ``xstar``.

    ``xstar`` is either a full variable vector or a signal vector.  Integer
    signals only.  With ``pin`` the objective is also fixed to that value.
    """
    xstar = as_vector(xstar)
    signal = model.signal or tuple((j, None) for j in range(model.num_vars))
    for p, q in signal:
        if not model.integer[p] or (q is not None and not model.integer[q]):
            raise ValueError("uniqueness cuts need integer signal variables")
    if len(xstar) == model.num_vars:
        if not model.is_feasible(xstar):
            raise InfeasiblePoint("point is not feasible for the model")
        target = model.signal_of(xstar)
    elif len(xstar) == len(signal):
        target = xstar
        if solve_milp(_fix_signal(model, target)).status is Status.INFEASIBLE:
            raise InfeasiblePoint("no feasible point of the model has this signal")
    else:
        raise ValueError(f"point of length {len(xstar)} matches neither the "
                         f"{model.num_vars} variables nor the {len(signal)} signal entries")

    out = model.copy() if pin is None else pin_objective(model, pin)
    binary = all(q is None and model.lower[p] == 0 and model.upper[p] == 1 for p, q in signal)
    if binary:
        coeffs, rhs = {}, 1
        for (p, _), t in zip(signal, target):
            if t == 1:
                coeffs[p] = coeffs.get(p, 0) - 1
                rhs -= 1
            else:
                coeffs[p] = coeffs.get(p, 0) + 1
        out.add_row(coeffs, ">=", rhs, name="nogood")
        return out

    indicators = []
    for k, ((p, q), t) in enumerate(zip(signal, target)):
        lo, hi = _signal_range(model, p, q)
        if lo is None or hi is None:
            raise ValueError("uniqueness cuts need bounded signal variables")
        expr = _signal_expr(p, q)
        if t + 1 <= hi:
            d = out.add_var(f"dp{k + 1}", 0, 1, integer=True)
            # d = 1 forces signal >= t + 1
            out.add_row({**expr, d: -(t + 1 - lo)}, ">=", lo, name=f"above{k + 1}")
            indicators.append(d)
        if t - 1 >= lo:
            d = out.add_var(f"dm{k + 1}", 0, 1, integer=True)
            # d = 1 forces signal <= t - 1
            out.add_row({**expr, d: hi - t + 1}, "<=", hi, name=f"below{k + 1}")
            indicators.append(d)
    out.add_row({d: 1 for d in indicators}, ">=", 1, name="nogood")
    return out


def unique_optimum(model: LpModel, result: SolveResult) -> bool:
    """Whether the optimal signal in ``result`` is the only optimal signal.

    Integer signals use the pin-and-cut test (the pinned, cut model must be
    infeasible).  Otherwise each signal coordinate is minimised and
    maximised over the pinned optimal face.
    """
    if result.status is not Status.OPTIMAL:
        raise ValueError("uniqueness needs an optimal result")
    signal = model.signal or tuple((j, None) for j in range(model.num_vars))
    target = model.signal_of(result.solution)
    integral = all(model.integer[p] and (q is None or model.integer[q]) for p, q in signal)
    if integral and all(None not in _signal_range(model, p, q) for p, q in signal):
        cut = add_uniqueness_cut(model, result.solution, pin=result.value)
        return solve_milp(cut).status is Status.INFEASIBLE
    pinned = pin_objective(model, result.value)
    solve = solve_milp if any(model.integer) else solve_lp
    for (p, q), t in zip(signal, target):
        for sense in ("min", "max"):
            probe = pinned.copy()
            probe.sense = sense
            probe.objective = [Fraction(0)] * probe.num_vars
            for j, c in _signal_expr(p, q).items():
                probe.objective[j] = Fraction(c)
            r = solve(probe)
            if r.status is not Status.OPTIMAL or r.value != t:
                return False
    return True


def goodness_model_for(X: ConstraintSet, A: RationalMatrix, s: int) -> LpModel:
    """The goodness model that fits X: binary, unit box (reals) or general box."""
    if X.is_binary():
        return build_goodness_binary(A, s)
    if X.kind in (SetKind.NONNEG_REALS, SetKind.NONNEG_INTEGERS):
        return build_goodness_unit_box(A, s)
    if X.kind is SetKind.BOX_REALS:
        return build_goodness_real_box(A, s, X.lower, X.upper)
    lo, hi = X.bounds()
    if X.is_integral and all(v is not None for v in lo + hi):
        return build_goodness_general(A, s, lo, hi)
    raise ValueError(f"no goodness model for {X.describe()}")
