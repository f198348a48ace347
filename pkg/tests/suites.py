"""Seeded grids shared by the acceptance run and the property tests.

Each suite returns a list of human-readable disagreements; empty means pass.
"""

import itertools
import random

from intsparse.conditions import (NspQuery, NspVariant, delta_ary_decode, delta_ary_matrix,
                                  is_s_good_l0, is_s_good_l1, nsp_check)
from intsparse.core import ConstraintSet, Objective, RationalMatrix, RecoveryInstance, Status
from intsparse.linalg import is_totally_unimodular, spark
from intsparse.milp import solve_lp, solve_milp
from intsparse.milp.builders import build_model, build_p1
from intsparse.oracle import brute_goodness, brute_goodness_l1, brute_solve

from strategies import seeded_matrix

# Every 2x2 minor of a matrix with entries in [-2, 2] is at most 8 in absolute value,
# so by Cramer's rule a minimal-support kernel vector fits in [-8, 8]^n.
CRAMER_REACH = 8


def _grid_box(rng, n):
    kind = rng.choice(["binary", "box", "nnbox", "symbox"])
    if kind == "binary":
        return ConstraintSet.binary(n)
    if kind == "nnbox":
        return ConstraintSet.nonneg_box([rng.randint(1, 3) for _ in range(n)])
    if kind == "symbox":
        return ConstraintSet.symmetric_box([rng.randint(1, 3) for _ in range(n)])
    return ConstraintSet.box([-rng.randint(0, 3) for _ in range(n)],
                             [rng.randint(1, 3) for _ in range(n)])


def _box_size(X):
    lo, hi = X.bounds()
    size = 1
    for l, u in zip(lo, hi):
        size *= int(u - l + 1)
    return size


def oracle_equivalence(count=200, seed=2024):
    """milp vs brute force on P0/P1, then goodness through three routes."""
    rng = random.Random(seed)
    bad = []
    solved = goodness = 0
    while solved < count:
        m, n = rng.randint(1, 4), rng.randint(2, 8)
        entries = rng.choice([(0, 1), (-2, 2)])
        A = seeded_matrix(rng, m, n, *entries)
        X = _grid_box(rng, n)
        if _box_size(X) > 20_000:
            continue
        lo, hi = X.bounds()
        x = [rng.randint(int(l), int(u)) if rng.random() < 0.5 else 0 for l, u in zip(lo, hi)]
        b = A.matvec(x)
        if rng.random() < 0.15:
            b = tuple(v + 1 for v in b)
        obj = rng.choice(list(Objective))
        inst = RecoveryInstance(A, b, X, obj)
        ref = brute_solve(inst)
        res = solve_milp(build_model(inst))
        solved += 1
        if res.status is not ref.status or (ref.status is Status.OPTIMAL
                                            and res.value != ref.value):
            bad.append(f"solve {A.rows} b={b} {X.describe()} {obj.value}: "
                       f"{res.status.value}/{res.value} vs {ref.status.value}/{ref.value}")
        if n <= 6:
            s = rng.randint(1, 2)
            verdicts = {"brute": brute_goodness(A, s, X).good,
                        "kernel": is_s_good_l0(A, s, X, method="oracle").good,
                        "milp": is_s_good_l0(A, s, X, method="milp").good}
            goodness += 1
            if len(set(verdicts.values())) != 1:
                bad.append(f"goodness {A.rows} s={s} {X.describe()}: {verdicts}")
    return bad, solved, goodness


def spark_equivalence(count=300, seed=7):
    """spark(A) > 2s iff no two s-sparse integral points share a measurement."""
    rng = random.Random(seed)
    bad = []
    for _ in range(count):
        n = rng.randint(2, 4)
        A = seeded_matrix(rng, rng.randint(1, 2), n, -2, 2)
        for s in range(0, n // 2 + 1):
            by_spark = spark(A) > 2 * s
            by_points = brute_goodness(A, s, ConstraintSet.symmetric_box(CRAMER_REACH, n)).good
            by_checker = is_s_good_l0(A, s, ConstraintSet.integers(n)).good
            if not by_spark == by_points == by_checker:
                bad.append(f"{A.rows} s={s}: spark {by_spark}, points {by_points}, "
                           f"checker {by_checker}")
    return bad


def implication_arrows(count=200, seed=11):
    """One-way implications between the nullspace properties and l1 goodness."""
    rng = random.Random(seed)
    bad = []
    for _ in range(count):
        n = rng.randint(2, 5)
        A = seeded_matrix(rng, rng.randint(1, 3), n, -2, 2)
        u = [rng.randint(1, 2) for _ in range(n)]
        lower = [-rng.randint(0, 2) for _ in range(n)]
        s = rng.randint(1, max(1, n // 2))
        sym = ([-2 * v for v in u], [2 * v for v in u])
        kernel_box = ([l - v for l, v in zip(lower, u)], [v - l for l, v in zip(lower, u)])
        nsp_z = nsp_check(A, NspQuery(NspVariant.NSP, order=s)).good
        nsp_box = nsp_check(A, NspQuery(NspVariant.NSP, box=kernel_box, order=s)).good
        plus_z = nsp_check(A, NspQuery(NspVariant.NSP_PLUS, order=s)).good
        plus_sym = nsp_check(A, NspQuery(NspVariant.NSP_PLUS, box=sym, order=s)).good
        X = ConstraintSet.box(lower, u)
        l1_good = is_s_good_l1(A, s, X).good
        arrows = [
            ("NSP(Z^n) => NSP(box)", nsp_z, nsp_box),
            ("NSP(box) => l1-good", nsp_box, l1_good),
            ("NSP(Z^n) => NSP+(Z^n)", nsp_z, plus_z),
            ("NSP+(Z^n) => NSP+([-u,u])", plus_z, plus_sym),
        ]
        for name, premise, conclusion in arrows:
            if premise and not conclusion:
                bad.append(f"{name} fails for {A.rows}, s={s}, l={lower}, u={u}")
    return bad


def l1_implies_l0(count=150, seed=13):
    rng = random.Random(seed)
    bad = []
    for _ in range(count):
        n = rng.randint(2, 5)
        A = seeded_matrix(rng, rng.randint(1, 3), n, -2, 2)
        X = _grid_box(rng, n)
        s = rng.randint(1, 2)
        l1 = is_s_good_l1(A, s, X).good
        if l1 != brute_goodness_l1(A, s, X).good:
            bad.append(f"l1 verdict differs from definition for {A.rows} s={s} {X.describe()}")
        if l1 and not is_s_good_l0(A, s, X).good:
            bad.append(f"l1-good but not l0-good: {A.rows} s={s} {X.describe()}")
    return bad


def delta_round_trip():
    bad = []
    for n in range(1, 5):
        for u in itertools.product(range(1, 4), repeat=n):
            A = delta_ary_matrix(u)
            for x in itertools.product(*(range(v + 1) for v in u)):
                if delta_ary_decode(A, A.matvec(x)[0], u) != x:
                    bad.append(f"u={u} x={x}")
    return bad


def network_matrix(rng, nodes, arcs):
    """Node-arc incidence matrix of a random digraph with one node row dropped."""
    cols = []
    while len(cols) < arcs:
        a, b = rng.sample(range(nodes), 2)
        col = [0] * nodes
        col[a], col[b] = 1, -1
        cols.append(col)
    return RationalMatrix.from_rows([[c[i] for c in cols] for i in range(nodes - 1)])


def network_integrality(count=40, seed=41):
    rng = random.Random(seed)
    bad = []
    for _ in range(count):
        A = network_matrix(rng, rng.randint(3, 6), rng.randint(4, 8))
        if not is_totally_unimodular(A):
            bad.append(f"not TU: {A.rows}")
        x = [rng.randint(0, 3) for _ in range(A.n)]
        for X in (ConstraintSet.nonneg_reals(A.n), ConstraintSet.reals(A.n)):
            res = solve_lp(build_p1(RecoveryInstance(A, A.matvec(x), X, Objective.L1)))
            if res.status is not Status.OPTIMAL or any(v.denominator != 1 for v in res.solution):
                bad.append(f"fractional vertex for {A.rows}, b={A.matvec(x)}")
    return bad
