"""Direct verifiers of sparse-recovery conditions.

Uniform conditions (every s-sparse signal in X is recovered) are decided by
enumerating integral kernel points in a box, by small exact LPs over the
kernel cone, by the spark, or by handing a goodness model to the MILP
engine.  Individual conditions decide recovery of one given signal.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .core import (BudgetExceeded, ConstraintSet, Objective, RationalMatrix,
                   RecoveryInstance, SetKind, Status, Support, as_vector,
                   format_rational, l1_norm, membership, primitive_integer_vector)
from .linalg import lattice_kernel_basis, rank, spark_with_witness
from .milp import LpModel, solve_lp, solve_milp
from .milp.builders import (REGIONS, add_uniqueness_cut, build_goodness_binary,
                            build_goodness_general, build_goodness_real_box, build_p1,
                            region_intervals, unique_optimum)

DEFAULT_BUDGET = 10**7


class Method(enum.Enum):
    ORACLE = "oracle"
    MILP = "milp"
    SPARK = "spark"
    LP = "lp"


@dataclass(frozen=True)
class GoodnessVerdict:
    """Outcome of a uniform recovery test.

    When ``good`` is false, ``witness`` is a nonzero integral kernel vector
    violating the condition and ``counterexample`` a pair ``(xhat, x)`` of
    distinct points of X with equal measurements, ``xhat`` s-sparse and
    ``x`` no worse than ``xhat`` under the objective.
    """

    good: bool
    method: Method
    witness: tuple | None = None
    support: Support | None = None
    counterexample: tuple | None = None
    route: str = ""

    def to_json(self) -> dict:
        out = {"good": self.good, "method": self.method.value}
        if self.route:
            out["route"] = self.route
        if self.witness is not None:
            out["witness"] = [format_rational(v) for v in self.witness]
        if self.support is not None:
            out["support"] = list(self.support.indices)
        if self.counterexample is not None:
            out["counterexample"] = [[format_rational(v) for v in x] for x in self.counterexample]
        return out


# --------------------------------------------------------------------------
# kernel enumeration
# --------------------------------------------------------------------------

def kernel_points(A: RationalMatrix, lower: Sequence, upper: Sequence,
                  budget: int = DEFAULT_BUDGET) -> Iterator[tuple]:
    """Integral points of ker(A) in the box [lower, upper], in lexicographic order.

    Walks integer combinations of the echelon lattice basis: the k-th
    coefficient only affects coordinates from the k-th pivot row on, so the
    admissible coefficients at each level form an interval.  Raises
    BudgetExceeded once more than ``budget`` search nodes are visited.
    """
    n = A.n
    lo = [math.ceil(Fraction(v)) for v in lower]
    hi = [math.floor(Fraction(v)) for v in upper]
    if len(lo) != n or len(hi) != n:
        raise ValueError("box dimension differs from column count")
    if any(a > b for a, b in zip(lo, hi)):
        return
    basis = lattice_kernel_basis(A)
    k = len(basis)
    pivots = [next(i for i, v in enumerate(col) if v) for col in basis]
    # rows fully determined after choosing coefficient j: [pivots[j], next pivot)
    spans = [(pivots[j], pivots[j + 1] if j + 1 < k else n) for j in range(k)]
    if any(not (lo[i] <= 0 <= hi[i]) for i in range(pivots[0] if k else n)):
        return
    visited = 0

    def walk(j, partial):
        nonlocal visited
        if j == k:
            yield tuple(partial)
            return
        col, p = basis[j], pivots[j]
        piv = col[p]
        c_lo = -((partial[p] - lo[p]) // piv)  # ceil((lo - partial) / piv)
        c_hi = (hi[p] - partial[p]) // piv
        a, b = spans[j]
        for c in range(c_lo, c_hi + 1):
            visited += 1
            if visited > budget:
                raise BudgetExceeded(f"kernel enumeration exceeded {budget} nodes")
            nxt = [x + c * y for x, y in zip(partial, col)] if c else list(partial)
            if all(lo[i] <= nxt[i] <= hi[i] for i in range(a, b)):
                yield from walk(j + 1, nxt)

    yield from walk(0, [0] * n)


def _nonzero_kernel_points(A, lower, upper, budget):
    for v in kernel_points(A, lower, upper, budget):
        if any(v):
            yield v


# --------------------------------------------------------------------------
# C(l, u)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionProfile:
    """Which region each coordinate of z falls in, and the eight counts."""

    z: tuple
    regions: tuple  # region name per coordinate, None for zero entries
    counts: dict = field(hash=False)

    def count(self, level: int) -> int:
        return self.counts[f"S{level}+"] + self.counts[f"S{level}-"]


def region_profile(z: Sequence, lower, upper) -> RegionProfile:
    z = [int(v) for v in as_vector(z)]
    n = len(z)
    lower = _per_coord(lower, n, math.ceil)
    upper = _per_coord(upper, n, math.floor)
    regions = []
    counts = dict.fromkeys(REGIONS, 0)
    for i, zi in enumerate(z):
        if not lower[i] - upper[i] <= zi <= upper[i] - lower[i]:
            raise ValueError(f"z[{i + 1}]={zi} outside [l-u, u-l]")
        if zi == 0:
            regions.append(None)
            continue
        name = next(name for name, (a, b) in region_intervals(lower[i], upper[i]).items()
                    if a <= zi <= b)
        regions.append(name)
        counts[name] += 1
    return RegionProfile(tuple(z), tuple(regions), counts)


def in_C(z: Sequence, s: int, lower, upper) -> bool:
    prof = region_profile(z, lower, upper)
    c1, c2, c3, c4 = (prof.count(k) for k in (1, 2, 3, 4))
    return c4 + c3 <= s and c4 + c2 <= s and 2 * c4 + c3 + c2 + c1 <= 2 * s


def split_witness(z: Sequence, s: int, lower, upper) -> tuple:
    """Two distinct s-sparse points of [l, u] whose difference is ``z`` in C(l, u)."""
    prof = region_profile(z, lower, upper)
    n = len(prof.z)
    lower = _per_coord(lower, n, math.ceil)
    upper = _per_coord(upper, n, math.floor)
    xhat, x = [0] * n, [0] * n
    flexible = []
    for i, (zi, reg) in enumerate(zip(prof.z, prof.regions)):
        if reg is None:
            continue
        level = reg[1]
        if level == "1":
            flexible.append(i)
        elif level == "2":
            xhat[i] = zi
        elif level == "3":
            x[i] = -zi
        else:
            edge = upper[i] if zi > 0 else lower[i]
            xhat[i], x[i] = edge, edge - zi
    room = s - sum(1 for v in xhat if v)
    for i in flexible:
        if room > 0:
            xhat[i] = prof.z[i]
            room -= 1
        else:
            x[i] = -prof.z[i]
    return tuple(map(Fraction, xhat)), tuple(map(Fraction, x))


def _per_coord(v, n, rounding):
    if isinstance(v, (int, Fraction, str)):
        v = [v] * n
    return [int(rounding(Fraction(x))) for x in v]


# --------------------------------------------------------------------------
# l0 goodness
# --------------------------------------------------------------------------

def _sign_split(z: Sequence, s: int) -> tuple:
    """Write a kernel vector with at most 2s nonzeros as xhat - x, both s-sparse."""
    nz = [i for i, v in enumerate(z) if v]
    first = set(nz[: min(s, len(nz))])
    xhat = tuple(Fraction(v) if i in first else Fraction(0) for i, v in enumerate(z))
    x = tuple(Fraction(0) if i in first else -Fraction(v) for i, v in enumerate(z))
    return xhat, x


def _signed_split(z: Sequence) -> tuple:
    """xhat = negative part, x = positive part of z."""
    return (tuple(Fraction(max(-v, 0)) for v in z), tuple(Fraction(max(v, 0)) for v in z))


def is_s_good_l0(A: RationalMatrix, s: int, X: ConstraintSet, method: str = "auto",
                 budget: int = DEFAULT_BUDGET) -> GoodnessVerdict:
    """Is every s-sparse x in X the unique s-sparse solution of Ax = Ax?

    ``method`` is ``"oracle"`` (kernel enumeration), ``"milp"`` or ``"auto"``.
    Z^n and R^n always use the spark.
    """
    if X.n != A.n:
        raise ValueError("dimension of X differs from the column count of A")
    if not 0 <= s <= A.n:
        raise ValueError(f"sparsity {s} outside [0, {A.n}]")
    if method not in ("auto", "oracle", "milp"):
        raise ValueError(f"unknown method {method!r}")
    kind = X.kind
    lo, hi = X.bounds()
    if s == 0:
        if kind in (SetKind.ALL_INTEGERS, SetKind.ALL_REALS):
            used = Method.SPARK
        else:
            used = Method.MILP if method == "milp" else Method.ORACLE
        return GoodnessVerdict(True, used, route="s=0")

    if kind in (SetKind.ALL_INTEGERS, SetKind.ALL_REALS) or (
            kind is SetKind.BOX_REALS and all(l < 0 < u for l, u in zip(lo, hi))):
        k, w = spark_with_witness(A, max_columns=max(A.n, 1))
        if k > 2 * s:
            return GoodnessVerdict(True, Method.SPARK, route="spark > 2s")
        w = primitive_integer_vector(w)
        return GoodnessVerdict(False, Method.SPARK, witness=w,
                               counterexample=_sign_split(w, s), route="spark > 2s")

    if kind in (SetKind.NONNEG_INTEGERS, SetKind.NONNEG_REALS) or not X.is_integral:
        return _good_real_box(A, s, X)

    if method == "milp":
        return _good_box_milp(A, s, lo, hi)
    try:
        return _good_box_oracle(A, s, lo, hi, budget)
    except BudgetExceeded:
        if method == "oracle":
            raise
        return _good_box_milp(A, s, lo, hi)


def _good_box_oracle(A, s, lo, hi, budget) -> GoodnessVerdict:
    box_lo = [l - u for l, u in zip(lo, hi)]
    box_hi = [u - l for l, u in zip(lo, hi)]
    for z in _nonzero_kernel_points(A, box_lo, box_hi, budget):
        if in_C(z, s, lo, hi):
            w = tuple(map(Fraction, z))
            return GoodnessVerdict(False, Method.ORACLE, witness=w,
                                   counterexample=split_witness(z, s, lo, hi),
                                   route="kernel box enumeration against C(l,u)")
    return GoodnessVerdict(True, Method.ORACLE, route="kernel box enumeration against C(l,u)")


def _good_box_milp(A, s, lo, hi) -> GoodnessVerdict:
    binary = all(l == 0 for l in lo) and all(u == 1 for u in hi)
    if binary:
        model = build_goodness_binary(A, s)
        res = solve_milp(model, cutoff=1)
        good = res.value == 0
        route = "binary goodness model"
    else:
        model = build_goodness_general(A, s, lo, hi)
        res = solve_milp(model, cutoff=0)
        good = res.status is Status.INFEASIBLE
        route = "C(l,u) indicator model"
    if res.status is Status.LIMIT:
        raise BudgetExceeded("MILP search stopped before a verdict")
    if good:
        return GoodnessVerdict(True, Method.MILP, route=route)
    z = tuple(int(v) for v in model.signal_of(res.solution))
    return GoodnessVerdict(False, Method.MILP, witness=tuple(map(Fraction, z)),
                           counterexample=split_witness(z, s, lo, hi), route=route)


def _good_real_box(A, s, X) -> GoodnessVerdict:
    """Nonnegative or mixed-sign real boxes, and Z^n_+ (equivalent by scaling)."""
    lo, hi = X.bounds()
    lo = [Fraction(0) if v is None else v for v in lo]
    hi = [Fraction(1) if v is None else v for v in hi]
    model = build_goodness_real_box(A, s, lo, hi)
    res = solve_milp(model, cutoff=Fraction(1, 10**9))
    if res.status is Status.LIMIT:
        raise BudgetExceeded("MILP search stopped before a verdict")
    if res.value == 0:
        return GoodnessVerdict(True, Method.MILP, route="real-box goodness model")
    z = primitive_integer_vector(model.signal_of(res.solution))
    # both sign parts have at most s entries; only nonnegative sets admit them as points
    cex = _signed_split(z) if X.kind in (SetKind.NONNEG_INTEGERS, SetKind.NONNEG_REALS) else None
    return GoodnessVerdict(False, Method.MILP, witness=z, counterexample=cex,
                           route="real-box goodness model")


# --------------------------------------------------------------------------
# nullspace properties
# --------------------------------------------------------------------------

class NspVariant(enum.Enum):
    NSP = "nsp"
    NSP_PLUS = "nsp+"


@dataclass(frozen=True)
class NspQuery:
    """``box`` = (lower, upper) restricts the kernel vectors; None means all of Z^n.

    Exactly one of ``support`` (a single set S) and ``order`` (all |S| <= s).
    """

    variant: NspVariant
    box: tuple | None = None
    support: Support | None = None
    order: int | None = None

    def __post_init__(self):
        if (self.support is None) == (self.order is None):
            raise ValueError("give exactly one of support and order")
        if self.order is not None and self.order < 0:
            raise ValueError("order must be nonnegative")


def nsp_violation(v: Sequence, variant: NspVariant, support: Support | None = None,
                  order: int | None = None) -> Support | None:
    """The support S on which the kernel vector ``v`` breaks the property, or None."""
    n = len(v)
    if variant is NspVariant.NSP:
        if support is None:
            ranked = sorted(range(n), key=lambda i: (-abs(v[i]), i))
            support = Support.from_zero_based(ranked[:min(order, n)])
        inside = set(support.zero_based())
        on = sum(abs(v[i]) for i in inside)
        off = sum(abs(v[i]) for i in range(n) if i not in inside)
        return support if on >= off else None
    negative = [i for i in range(n) if v[i] < 0]
    if sum(v) > 0:
        return None
    if support is None:
        return Support.from_zero_based(negative) if len(negative) <= order else None
    inside = set(support.zero_based())
    return support if all(i in inside for i in negative) else None


def nsp_check(A: RationalMatrix, query: NspQuery,
              budget: int = DEFAULT_BUDGET) -> GoodnessVerdict:
    """Does A satisfy the (positive) nullspace property described by ``query``?"""
    if query.order is not None and query.order > A.n:
        raise ValueError("order exceeds the number of columns")
    if query.box is not None:
        lower, upper = query.box
        lower = _per_coord(lower, A.n, math.ceil)
        upper = _per_coord(upper, A.n, math.floor)
        for v in _nonzero_kernel_points(A, lower, upper, budget):
            S = nsp_violation(v, query.variant, query.support, query.order)
            if S is not None:
                w = tuple(map(Fraction, v))
                return GoodnessVerdict(False, Method.ORACLE, witness=w, support=S,
                                       counterexample=_nsp_counterexample(w, S, query.variant),
                                       route=f"{query.variant.value} over kernel box")
        return GoodnessVerdict(True, Method.ORACLE, route=f"{query.variant.value} over kernel box")
    supports = ([query.support] if query.support is not None else
                [Support.from_zero_based(c) for c in itertools.combinations(range(A.n), query.order)])
    for S in supports:
        if query.variant is NspVariant.NSP:
            v = _nsp_lp(A, S)
        else:
            v = _nsp_plus_lp(A, S)
        if v is not None:
            w = primitive_integer_vector(v)
            S_hit = nsp_violation(w, query.variant, S) or S
            return GoodnessVerdict(False, Method.LP, witness=w, support=S_hit,
                                   counterexample=_nsp_counterexample(w, S_hit, query.variant),
                                   route=f"{query.variant.value} over the kernel cone")
    return GoodnessVerdict(True, Method.LP, route=f"{query.variant.value} over the kernel cone")


def _nsp_counterexample(v, S, variant):
    inside = set(S.zero_based())
    if variant is NspVariant.NSP:
        xhat = tuple(v[i] if i in inside else Fraction(0) for i in range(len(v)))
        x = tuple(-v[i] if i not in inside else Fraction(0) for i in range(len(v)))
        return xhat, x
    return _signed_split(v)


def _kernel_lp(A: RationalMatrix, free: Sequence[int], split: Sequence[int]) -> tuple:
    """LpModel with v_i free for i in ``free`` and v_i = p_i - q_i for i in ``split``."""
    model = LpModel(sense="min")
    col = {}
    for i in free:
        col[i] = (model.add_var(f"v{i + 1}", None, None), None)
    for i in split:
        p = model.add_var(f"p{i + 1}", 0, None)
        q = model.add_var(f"q{i + 1}", 0, None)
        col[i] = (p, q)
    for row in A.rows:
        coeffs = {}
        for i, a in enumerate(row):
            if a and i in col:
                p, q = col[i]
                coeffs[p] = a
                if q is not None:
                    coeffs[q] = -a
        model.add_row(coeffs, "==", 0)
    model.signal = tuple(col[i] for i in range(A.n))
    return model


def _nsp_lp(A: RationalMatrix, S: Support) -> tuple | None:
    """Kernel v with ||v_S||_1 >= ||v_S^c||_1, v != 0, or None (exact LPs)."""
    inside = list(S.zero_based())
    if not inside:
        return None
    outside = [i for i in range(A.n) if i not in set(inside)]
    base = _kernel_lp(A, inside, outside)
    for tail in itertools.product((1, -1), repeat=len(inside) - 1):
        sigma = (1,) + tail
        model = base.copy()
        model.add_row({base.signal[i][0]: sg for i, sg in zip(inside, sigma)}, "==", 1)
        for i in outside:
            p, q = base.signal[i]
            model.objective[p] = model.objective[q] = Fraction(1)
        res = solve_lp(model)
        if res.status is Status.OPTIMAL and res.value <= 1:
            return model.signal_of(res.solution)
    return None


def _nsp_plus_lp(A: RationalMatrix, S: Support) -> tuple | None:
    """Nonzero kernel v with v_{S^c} >= 0 and 1'v <= 0, or None."""
    inside = set(S.zero_based())
    n = A.n
    model = LpModel(sense="min")
    for i in range(n):
        model.add_var(f"v{i + 1}", -1 if i in inside else 0, 1, cost=1)
    for row in A.rows:
        model.add_row(list(row), "==", 0)
    res = solve_lp(model)
    if res.value < 0:
        return res.solution
    model.add_row([1] * n, "==", 0)
    return _nonzero_on_face(model)


def _nonzero_on_face(model: LpModel) -> tuple | None:
    """A nonzero feasible point of a polytope containing 0, if there is one."""
    for i in range(model.num_vars):
        for sense in ("max", "min"):
            probe = model.copy()
            probe.sense = sense
            probe.objective = [Fraction(0)] * probe.num_vars
            probe.objective[i] = Fraction(1)
            res = solve_lp(probe)
            if res.status is Status.UNBOUNDED:
                raise RuntimeError("face probe is unexpectedly unbounded")
            if res.value != 0:
                return res.solution
    return None


# --------------------------------------------------------------------------
# l1 goodness
# --------------------------------------------------------------------------

def is_s_good_l1(A: RationalMatrix, s: int, X: ConstraintSet,
                 budget: int = DEFAULT_BUDGET) -> GoodnessVerdict:
    """Is every s-sparse x in X the unique l1 minimiser for b = Ax over X?"""
    if X.n != A.n:
        raise ValueError("dimension of X differs from the column count of A")
    if not 0 <= s <= A.n:
        raise ValueError(f"sparsity {s} outside [0, {A.n}]")
    if s == 0:
        return GoodnessVerdict(True, Method.ORACLE, route="s=0")
    kind = X.kind
    lo, hi = X.bounds()
    if kind in (SetKind.ALL_INTEGERS, SetKind.ALL_REALS):
        return _tag(nsp_check(A, NspQuery(NspVariant.NSP, order=s), budget), "NSP(Z^n) of order s")
    if kind in (SetKind.NONNEG_INTEGERS, SetKind.NONNEG_REALS):
        return _tag(nsp_check(A, NspQuery(NspVariant.NSP_PLUS, order=s), budget),
                    "NSP+(Z^n) of order s")
    if kind is SetKind.BOX_REALS:
        if all(l == 0 for l in lo):
            return _tag(nsp_check(A, NspQuery(NspVariant.NSP_PLUS, order=s), budget),
                        "NSP+(R^n) of order s")
        if all(l < 0 < u for l, u in zip(lo, hi)):
            return _tag(nsp_check(A, NspQuery(NspVariant.NSP, order=s), budget),
                        "NSP(R^n) of order s")
        raise ValueError("mixed-sign real boxes are not supported for l1 goodness")
    if all(l == 0 for l in lo):
        box = ([-u for u in hi], list(hi))
        return _tag(nsp_check(A, NspQuery(NspVariant.NSP_PLUS, box=box, order=s), budget),
                    "NSP+([-u,u]_Z) of order s")
    # general bounded integers: sufficient test first, then the exact split test
    box = ([l - u for l, u in zip(lo, hi)], [u - l for l, u in zip(lo, hi)])
    quick = nsp_check(A, NspQuery(NspVariant.NSP, box=box, order=s), budget)
    if quick.good:
        return _tag(quick, "NSP([l-u,u-l]_Z) of order s (sufficient)")
    return _split_nsp_plus(A, s, lo, hi, budget)


def _tag(verdict: GoodnessVerdict, route: str) -> GoodnessVerdict:
    return GoodnessVerdict(verdict.good, verdict.method, verdict.witness, verdict.support,
                           verdict.counterexample, route)


def _split_choices(zi: int, v_range: tuple, w_range: tuple) -> dict:
    """Cheapest (v_i, w_i) with v_i - w_i = zi, keyed by how many of them are negative."""
    best = {}
    for v in range(v_range[0], v_range[1] + 1):
        w = v - zi
        if not w_range[0] <= w <= w_range[1] or (v < 0 and w < 0):
            continue
        k = (v < 0) + (w < 0)
        if k not in best or v + w < best[k][0]:
            best[k] = (v + w, v, w)
    return best


def _cheapest_split(z, v_ranges, w_ranges, max_negative):
    """Minimise 1'(v + w) over splits v - w = z with at most ``max_negative``
    negative entries overall; returns (cost, v, w) or None."""
    # table[c] = (cost, v, w) using exactly c negative entries so far
    table = {0: (0, [], [])}
    for zi, vr, wr in zip(z, v_ranges, w_ranges):
        opts = _split_choices(zi, vr, wr)
        nxt = {}
        for c, (cost, vs, ws) in table.items():
            for k, (extra, v, w) in opts.items():
                if max_negative is not None and c + k > max_negative:
                    continue
                key = c + k if max_negative is not None else 0
                cand = (cost + extra, vs + [v], ws + [w])
                if key not in nxt or cand[0] < nxt[key][0]:
                    nxt[key] = cand
        table = nxt
        if not table:
            return None
    return min(table.values(), key=lambda t: t[0])


def _split_nsp_plus(A, s, lo, hi, budget) -> GoodnessVerdict:
    """Exact l1 goodness over [l, u]_Z through the split matrix (A, -A).

    A violating split kernel vector (v, w) has v - w = z in ker(A), so it is
    enough to enumerate z in [l-u, u-l] and pick the cheapest split.
    """
    lo = [int(v) for v in lo]
    hi = [int(v) for v in hi]
    v_ranges = [(-u, u) for u in hi]
    w_ranges = [(l, -l) for l in lo]
    box = ([l - u for l, u in zip(lo, hi)], [u - l for l, u in zip(lo, hi)])
    route = "split NSP+ of order s"
    for z in _nonzero_kernel_points(A, *box, budget):
        best = _cheapest_split(z, v_ranges, w_ranges, s)
        if best is not None and best[0] <= 0:
            _, v, w = best
            xhat = tuple(Fraction(max(-a, 0) - max(-b, 0)) for a, b in zip(v, w))
            x = tuple(Fraction(max(a, 0) - max(b, 0)) for a, b in zip(v, w))
            neg = [i for i in range(len(z)) if v[i] < 0 or w[i] < 0]
            return GoodnessVerdict(False, Method.ORACLE, witness=tuple(map(Fraction, z)),
                                   support=Support.from_zero_based(neg),
                                   counterexample=(xhat, x), route=route)
    return GoodnessVerdict(True, Method.ORACLE, route=route)


# --------------------------------------------------------------------------
# individual recovery
# --------------------------------------------------------------------------

class Recoverability(enum.Enum):
    RECOVERABLE = "recoverable"
    NOT_RECOVERABLE = "not-recoverable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class IndividualVerdict:
    status: Recoverability
    method: Method
    route: str
    witness: tuple | None = None
    counterexample: tuple | None = None  # (xhat, competitor)

    @property
    def good(self) -> bool | None:
        if self.status is Recoverability.UNKNOWN:
            return None
        return self.status is Recoverability.RECOVERABLE

    def to_json(self) -> dict:
        out = {"good": self.good, "status": self.status.value,
               "method": self.method.value, "route": self.route}
        if self.witness is not None:
            out["witness"] = [format_rational(v) for v in self.witness]
        if self.counterexample is not None:
            out["counterexample"] = [[format_rational(v) for v in x] for x in self.counterexample]
        return out


def indiv_recoverable(xhat: Sequence, A: RationalMatrix, X: ConstraintSet,
                      definitional: bool = True,
                      budget: int = DEFAULT_BUDGET) -> IndividualVerdict:
    """Is ``xhat`` the unique l1 minimiser over X for b = A xhat?

    Exact characterisations are used where available.  For Z^n only a
    sufficient condition exists; when it fails the answer is UNKNOWN unless
    ``definitional`` asks for an exact l1 solve with a uniqueness test.
    """
    xhat = as_vector(xhat)
    if not membership(xhat, X):
        raise ValueError("xhat is not a member of X")
    kind = X.kind
    n = A.n
    if kind in (SetKind.ALL_INTEGERS, SetKind.ALL_REALS):
        v = _sign_pattern_violation(A, xhat)
        if v is None:
            return IndividualVerdict(Recoverability.RECOVERABLE, Method.LP,
                                     "sign-pattern nullspace condition")
        if kind is SetKind.ALL_REALS:
            w = primitive_integer_vector(v)
            return IndividualVerdict(Recoverability.NOT_RECOVERABLE, Method.LP,
                                     "sign-pattern nullspace condition", witness=w)
        if not definitional:
            return IndividualVerdict(Recoverability.UNKNOWN, Method.LP,
                                     "sign-pattern nullspace condition (sufficient)")
        return _definitional(xhat, A, X)
    if kind is SetKind.NONNEG_REALS or (kind is SetKind.BOX_REALS and all(l == 0 for l in X.lower)):
        S = Support.of_vector(xhat)
        v = _nsp_plus_lp(A, S)
        if v is None:
            return IndividualVerdict(Recoverability.RECOVERABLE, Method.LP, "NSP+ on supp(xhat)")
        return IndividualVerdict(Recoverability.NOT_RECOVERABLE, Method.LP, "NSP+ on supp(xhat)",
                                 witness=primitive_integer_vector(v))
    if not X.is_integral:
        raise ValueError(f"individual recovery over {X.describe()} is not supported")
    lo, hi = X.bounds()
    if kind is SetKind.NONNEG_INTEGERS:
        cap = l1_norm(xhat)
        hi = [cap] * n
    lo = [int(v) for v in lo]
    hi = [int(v) for v in hi]
    xh = [int(v) for v in xhat]
    if all(l == 0 for l in lo):
        route = "kernel shift xhat + v in X implies 1'v > 0"
        for v in _nonzero_kernel_points(A, [-a for a in xh], [u - a for u, a in zip(hi, xh)], budget):
            if sum(v) <= 0:
                comp = tuple(Fraction(a + b) for a, b in zip(xh, v))
                return IndividualVerdict(Recoverability.NOT_RECOVERABLE, Method.ORACLE, route,
                                         witness=tuple(map(Fraction, v)),
                                         counterexample=(xhat, comp))
        return IndividualVerdict(Recoverability.RECOVERABLE, Method.ORACLE, route)
    route = "split kernel shift"
    xp = [max(a, 0) for a in xh]
    xm = [max(-a, 0) for a in xh]
    v_ranges = [(-p, u - p) for p, u in zip(xp, hi)]
    w_ranges = [(-m, -l - m) for m, l in zip(xm, lo)]
    box = ([l - a for l, a in zip(lo, xh)], [u - a for u, a in zip(hi, xh)])
    for z in _nonzero_kernel_points(A, *box, budget):
        best = _cheapest_split(z, v_ranges, w_ranges, None)
        if best is not None and best[0] <= 0:
            comp = tuple(Fraction(a + b) for a, b in zip(xh, z))
            return IndividualVerdict(Recoverability.NOT_RECOVERABLE, Method.ORACLE, route,
                                     witness=tuple(map(Fraction, z)),
                                     counterexample=(xhat, comp))
    return IndividualVerdict(Recoverability.RECOVERABLE, Method.ORACLE, route)


def _sign_pattern_violation(A: RationalMatrix, xhat) -> tuple | None:
    """Nonzero kernel v with |sum_S sign(xhat_i) v_i| >= ||v_{S^c}||_1, or None."""
    n = A.n
    inside = [i for i in range(n) if xhat[i]]
    outside = [i for i in range(n) if not xhat[i]]
    if not inside:
        return None
    sigma = {i: (1 if xhat[i] > 0 else -1) for i in inside}
    # v supported on S with sigma'v_S = 0
    sub = RationalMatrix.from_rows([[row[i] for i in inside] for row in A.rows]
                                   + [[sigma[i] for i in inside]])
    if rank(sub) < len(inside):
        from .linalg import kernel_basis
        kb = kernel_basis(sub).vectors[0]
        v = [Fraction(0)] * n
        for i, c in zip(inside, kb):
            v[i] = c
        return tuple(v)
    model = _kernel_lp(A, inside, outside)
    model.add_row({model.signal[i][0]: sigma[i] for i in inside}, "==", 1)
    for i in outside:
        p, q = model.signal[i]
        model.objective[p] = model.objective[q] = Fraction(1)
    res = solve_lp(model)
    if res.status is Status.OPTIMAL and res.value <= 1:
        return model.signal_of(res.solution)
    return None


def _definitional(xhat, A, X) -> IndividualVerdict:
    inst = RecoveryInstance(A, A.matvec(xhat), X, Objective.L1)
    cap = l1_norm(xhat)
    model = build_p1(inst, bounds=([-cap] * A.n, [cap] * A.n))
    res = solve_milp(model)
    route = "exact l1 solve with uniqueness cut"
    signal = model.signal_of(res.solution)
    if res.value < l1_norm(xhat):
        return IndividualVerdict(Recoverability.NOT_RECOVERABLE, Method.MILP, route,
                                 counterexample=(xhat, signal))
    if signal != tuple(xhat):
        return IndividualVerdict(Recoverability.NOT_RECOVERABLE, Method.MILP, route,
                                 counterexample=(xhat, signal))
    if unique_optimum(model, res):
        return IndividualVerdict(Recoverability.RECOVERABLE, Method.MILP, route)
    other = solve_milp(add_uniqueness_cut(model, res.solution, pin=res.value))
    return IndividualVerdict(Recoverability.NOT_RECOVERABLE, Method.MILP, route,
                             counterexample=(xhat, model.signal_of(other.solution)))


# --------------------------------------------------------------------------
# delta-ary encoding
# --------------------------------------------------------------------------

class NotInRange(ValueError):
    """b has no representation A x with x in [0, u]_Z."""


def delta_ary_matrix(u: Sequence) -> RationalMatrix:
    """The 1 x n matrix (1, d, d^2, ...) with d = max(u) + 1."""
    u = [int(v) for v in u]
    if not u:
        raise ValueError("need at least one coordinate")
    if any(v < 1 for v in u):
        raise ValueError("upper bounds must be positive")
    d = max(u) + 1
    return RationalMatrix.from_rows([[d**k for k in range(len(u))]])


def delta_ary_decode(A: RationalMatrix, b, u: Sequence) -> tuple:
    """Digits of b in base d, which is the unique x in [0, u]_Z with Ax = b."""
    u = [int(v) for v in u]
    row = A.rows[0]
    if A.m != 1 or len(row) != len(u):
        raise ValueError("expected a 1 x n matrix matching u")
    d = int(row[1]) if len(row) > 1 else max(u) + 1
    if any(row[k] != d**k for k in range(len(row))):
        raise ValueError("matrix is not a delta-ary matrix")
    b = Fraction(b if not isinstance(b, (list, tuple)) else b[0])
    if b.denominator != 1 or b < 0:
        raise NotInRange(f"{b} is not a nonnegative integer")
    rest, digits = int(b), []
    for ui in u:
        rest, r = divmod(rest, d)
        if r > ui:
            raise NotInRange(f"digit {r} exceeds its bound {ui}")
        digits.append(Fraction(r))
    if rest:
        raise NotInRange(f"{b} needs more than {len(u)} digits")
    return tuple(digits)
