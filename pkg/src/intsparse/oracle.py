"""Brute-force reference answers for small instances.

Nothing here reuses the constraint evaluation, kernel machinery or solvers
of the rest of the package: points are enumerated with ``itertools`` and
checked with plain integer/fraction arithmetic, so agreement with the
solvers is meaningful evidence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (BudgetExceeded, ConstraintSet, Objective, RecoveryInstance, SetKind,
                   SolveResult, Status)


@dataclass(frozen=True)
class EnumerationBudget:
    max_points: int = 2_000_000
    max_support_sets: int = 200_000

    def __post_init__(self):
        if self.max_points <= 0 or self.max_support_sets <= 0:
            raise ValueError("budgets must be positive")


DEFAULT = EnumerationBudget()


def _rows(A) -> list:
    return [[Fraction(v) for v in row] for row in A.rows]


def _apply(rows, x) -> tuple:
    return tuple(sum(a * v for a, v in zip(row, x)) for row in rows)


def _box_of(X: ConstraintSet, box) -> tuple:
    """Integer ranges per coordinate: X's bounds, tightened by ``box`` if given."""
    lo, hi = X.bounds()
    if box is not None:
        blo, bhi = box
        n = X.n
        blo = [blo] * n if isinstance(blo, (int, Fraction)) else list(blo)
        bhi = [bhi] * n if isinstance(bhi, (int, Fraction)) else list(bhi)
        lo = [b if v is None else max(Fraction(b), v) for b, v in zip(blo, lo)]
        hi = [b if v is None else min(Fraction(b), v) for b, v in zip(bhi, hi)]
    if any(v is None for v in list(lo) + list(hi)):
        raise ValueError("brute force needs a finite box")
    return [range(-(-Fraction(l).numerator // Fraction(l).denominator),
                  Fraction(u).numerator // Fraction(u).denominator + 1)
            for l, u in zip(lo, hi)]


def _count(ranges) -> int:
    total = 1
    for r in ranges:
        total *= len(r)
    return total


def _l0(x) -> int:
    return sum(1 for v in x if v != 0)


def _l1(x) -> Fraction:
    return sum((abs(Fraction(v)) for v in x), Fraction(0))


def _points(ranges, budget: EnumerationBudget):
    if _count(ranges) > budget.max_points:
        raise BudgetExceeded(f"{_count(ranges)} points exceed the budget of {budget.max_points}")
    return itertools.product(*ranges)


def _sparse_points(ranges, s: int, budget: EnumerationBudget):
    """Points of the box with at most s nonzeros, in lexicographic order."""
    n = len(ranges)
    nonzero = [[v for v in r if v != 0] for r in ranges]
    total = 0
    for k in range(s + 1):
        for T in itertools.combinations(range(n), k):
            size = 1
            for i in T:
                size *= len(nonzero[i])
            total += size
    if total > budget.max_points:
        raise BudgetExceeded(f"{total} sparse points exceed the budget of {budget.max_points}")
    out = []
    for k in range(s + 1):
        for T in itertools.combinations(range(n), k):
            for vals in itertools.product(*(nonzero[i] for i in T)):
                x = [0] * n
                for i, v in zip(T, vals):
                    x[i] = v
                out.append(tuple(x))
    out.sort()
    return out


# --------------------------------------------------------------------------
# problems
# --------------------------------------------------------------------------

def brute_solve(instance: RecoveryInstance, box=None,
                budget: EnumerationBudget = DEFAULT) -> SolveResult:
    """Exact optimum and full optimal set of P0/P1 by exhaustive search.

    Integral sets are enumerated point by point inside their bounds (or
    ``box`` for unbounded sets).  R^n and R^n_+ are handled through their
    finitely many candidate supports with linearly independent columns.
    """
    X = instance.X
    rows = _rows(instance.A)
    b = tuple(Fraction(v) for v in instance.b)
    norm = _l0 if instance.objective is Objective.L0 else _l1
    if X.kind in (SetKind.ALL_REALS, SetKind.NONNEG_REALS):
        return _brute_continuous(rows, b, X.kind is SetKind.NONNEG_REALS, norm, budget)
    if not X.is_integral:
        raise ValueError("brute force handles integral sets, R^n and R^n_+ only")
    best, optima = None, []
    for x in _points(_box_of(X, box), budget):
        if _apply(rows, x) != b:
            continue
        val = norm(x)
        if best is None or val < best:
            best, optima = val, [x]
        elif val == best:
            optima.append(x)
    if best is None:
        return SolveResult(Status.INFEASIBLE, optima=())
    optima = tuple(tuple(Fraction(v) for v in x) for x in optima)
    return SolveResult(Status.OPTIMAL, value=Fraction(best), solution=optima[0],
                       unique=len(optima) == 1, optima=optima)


def _solve_square(M, rhs):
    """Unique solution of a full-column-rank system M y = rhs, or None."""
    m, k = len(M), len(M[0]) if M else 0
    aug = [list(r) + [v] for r, v in zip(M, rhs)]
    row = 0
    where = []
    for col in range(k):
        piv = next((i for i in range(row, m) if aug[i][col] != 0), None)
        if piv is None:
            return None  # dependent columns
        aug[row], aug[piv] = aug[piv], aug[row]
        p = aug[row][col]
        aug[row] = [v / p for v in aug[row]]
        for i in range(m):
            if i != row and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * c for a, c in zip(aug[i], aug[row])]
        where.append(row)
        row += 1
    if any(aug[i][k] != 0 for i in range(row, m)):
        return "inconsistent"
    return [aug[r][k] for r in where]


def _brute_continuous(rows, b, nonneg, norm, budget) -> SolveResult:
    """Candidate optima are the solutions on supports with independent columns.

    For l0 a minimum-support solution always has independent columns, and
    for l1 the optimum is attained at such vertices of the (split) feasible
    polyhedron, whose optimal face is their convex hull.
    """
    n = len(rows[0]) if rows else 0
    cols = [[r[j] for r in rows] for j in range(n)]
    signed = [(j, 1) for j in range(n)] + ([] if nonneg else [(j, -1) for j in range(n)])
    seen = 0
    best, optima = None, []
    for k in range(0, min(len(rows), n) + 1):
        for T in itertools.combinations(range(len(signed)), k):
            seen += 1
            if seen > budget.max_support_sets:
                raise BudgetExceeded("too many supports")
            idx = [signed[t][0] for t in T]
            if len(set(idx)) < len(idx):
                continue
            M = [[cols[j][i] * sg for (j, sg) in (signed[t] for t in T)] for i in range(len(rows))]
            y = _solve_square(M, b) if k else ([] if all(v == 0 for v in b) else "inconsistent")
            if y is None or y == "inconsistent":
                continue
            if any(v < 0 for v in y) or any(v == 0 for v in y):
                continue
            x = [Fraction(0)] * n
            for t, v in zip(T, y):
                j, sg = signed[t]
                x[j] = sg * v
            x = tuple(x)
            val = norm(x)
            if best is None or val < best:
                best, optima = val, [x]
            elif val == best and x not in optima:
                optima.append(x)
    if best is None:
        return SolveResult(Status.INFEASIBLE, optima=())
    optima.sort()
    return SolveResult(Status.OPTIMAL, value=Fraction(best), solution=optima[0],
                       unique=len(optima) == 1, optima=tuple(optima))


def brute_kernel_points(A, box, budget: EnumerationBudget = DEFAULT) -> list:
    """All integral v in the box with Av = 0, lexicographically sorted (0 included)."""
    lo, hi = box
    n = A.n
    lo = [lo] * n if isinstance(lo, (int, Fraction)) else list(lo)
    hi = [hi] * n if isinstance(hi, (int, Fraction)) else list(hi)
    ranges = [range(int(l), int(h) + 1) for l, h in zip(lo, hi)]
    rows = _rows(A)
    zero = tuple(Fraction(0) for _ in rows)
    return [tuple(Fraction(v) for v in x) for x in _points(ranges, budget)
            if _apply(rows, x) == zero]


# --------------------------------------------------------------------------
# conditions by definition
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleVerdict:
    good: bool
    pair: tuple | None = None  # (xhat, x) breaking the definition
    kernel_vector: tuple | None = None  # NSP checks report the kernel vector directly
    support: tuple | None = None

    @property
    def witness(self):
        if self.kernel_vector is not None:
            return self.kernel_vector
        if self.pair is None:
            return None
        return tuple(a - b for a, b in zip(*self.pair))


def brute_goodness(A, s: int, X: ConstraintSet, box=None,
                   budget: EnumerationBudget = DEFAULT) -> OracleVerdict:
    """(s, X, 0)-goodness by definition: no two s-sparse points of X share Ax."""
    rows = _rows(A)
    groups = {}
    for x in _sparse_points(_box_of(X, box), s, budget):
        key = _apply(rows, x)
        if key in groups:
            first = tuple(Fraction(v) for v in groups[key])
            return OracleVerdict(False, (first, tuple(Fraction(v) for v in x)))
        groups[key] = x
    return OracleVerdict(True)


def _l1_groups(A, X, box, budget):
    rows = _rows(A)
    groups = {}
    for x in _points(_box_of(X, box), budget):
        key = _apply(rows, x)
        groups.setdefault(key, []).append(x)
    return groups


def brute_goodness_l1(A, s: int, X: ConstraintSet, box=None,
                      budget: EnumerationBudget = DEFAULT) -> OracleVerdict:
    """(s, X, 1)-goodness by definition: every s-sparse point of X is the unique
    l1 minimiser among the points of X with the same measurement."""
    for members in _l1_groups(A, X, box, budget).values():
        for xhat in members:
            if _l0(xhat) > s:
                continue
            rival = next((x for x in members if x != xhat and _l1(x) <= _l1(xhat)), None)
            if rival is not None:
                return OracleVerdict(False, (tuple(Fraction(v) for v in xhat),
                                             tuple(Fraction(v) for v in rival)))
    return OracleVerdict(True)


def brute_individual(xhat: Sequence, A, X: ConstraintSet, box=None,
                     budget: EnumerationBudget = DEFAULT) -> OracleVerdict:
    """Is xhat the unique l1 minimiser over X (within the box) for b = A xhat?"""
    rows = _rows(A)
    xhat = tuple(Fraction(v) for v in xhat)
    b = _apply(rows, xhat)
    for x in _points(_box_of(X, box), budget):
        x = tuple(Fraction(v) for v in x)
        if x != xhat and _apply(rows, x) == b and _l1(x) <= _l1(xhat):
            return OracleVerdict(False, (xhat, x))
    return OracleVerdict(True)


def brute_nsp(A, box, s: int | None = None, support: Sequence[int] | None = None,
              plus: bool = False, budget: EnumerationBudget = DEFAULT) -> OracleVerdict:
    """NSP / NSP+ over the kernel points of a box, with every support checked.

    ``support`` holds 0-based indices; otherwise all supports of size <= s.
    A violation carries the kernel vector and the (0-based) support it breaks.
    """
    n = A.n
    if support is not None:
        supports = [tuple(support)]
    else:
        supports = [T for k in range(s + 1) for T in itertools.combinations(range(n), k)]
    for v in brute_kernel_points(A, box, budget):
        if not any(v):
            continue
        for T in supports:
            inside = set(T)
            if plus:
                off_ok = all(v[i] >= 0 for i in range(n) if i not in inside)
                if off_ok and sum(v) <= 0:
                    return OracleVerdict(False, kernel_vector=v, support=T)
            else:
                if sum(abs(v[i]) for i in inside) >= sum(abs(v[i]) for i in range(n)
                                                         if i not in inside):
                    return OracleVerdict(False, kernel_vector=v, support=T)
    return OracleVerdict(True)
