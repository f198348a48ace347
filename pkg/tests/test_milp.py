import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from intsparse.core import (ConstraintSet, Objective, RationalMatrix, RecoveryInstance,
                            Status)
from intsparse.milp import (LpModel, UnboundedIntegral, dump_lp, parse_lp, solve_instance,
                            solve_lp, solve_milp)
from intsparse.milp.builders import (InfeasiblePoint, MissingBounds, add_uniqueness_cut,
                                     build_goodness_binary, build_goodness_binary_alt,
                                     build_goodness_general, build_goodness_unit_box,
                                     build_p0, build_p1, pin_objective, unique_optimum)
from intsparse.oracle import brute_goodness, brute_kernel_points
from intsparse.conditions import in_C

from strategies import CYCLIC, EX1_A, FIVE_BY_SIX, matrices, seeded_matrix

M = RationalMatrix.from_rows
Z3P = ConstraintSet.nonneg_integers(3)


def inst(A, b, X, obj="l1"):
    return RecoveryInstance(A, b, X, Objective(obj))


# ---------------------------------------------------------------- LP engine

def test_lp_example_relaxation():
    res = solve_lp(build_p1(inst(EX1_A, (11,), ConstraintSet.nonneg_reals(3))))
    assert res.status is Status.OPTIMAL
    assert res.value == Fraction(11, 6)
    assert tuple(res.solution) == (0, 0, Fraction(11, 6))


def test_lp_without_constraints():
    model = LpModel()
    model.add_var("x", 0, 5)
    res = solve_lp(model)
    assert res.status is Status.OPTIMAL and res.value == 0


def test_lp_unbounded():
    model = LpModel(sense="max")
    model.add_var("x", 0, None, cost=1)
    assert solve_lp(model).status is Status.UNBOUNDED


def test_lp_infeasible():
    model = LpModel()
    model.add_var("x", 0, 1)
    model.add_row([1], ">=", 2)
    assert solve_lp(model).status is Status.INFEASIBLE


def test_lp_free_variables_and_inequalities():
    # min x - y  s.t.  x + y >= 2, x - 2y <= 1, y <= 3, x free
    model = LpModel()
    model.add_var("x", None, None, cost=1)
    model.add_var("y", None, 3, cost=-1)
    model.add_row([1, 1], ">=", 2)
    model.add_row([1, -2], "<=", 1)
    res = solve_lp(model)
    assert res.status is Status.OPTIMAL
    assert res.value == -4 and tuple(res.solution) == (-1, 3)


def test_lp_degenerate_cycling_example():
    # Beale's classical cycling instance; anti-cycling must terminate at -1/20.
    model = LpModel()
    for c in ("-3/4", 150, "-1/50", 6):
        model.add_var(cost=Fraction(c))
    model.add_row(["1/4", -60, "-1/25", 9], "<=", 0)
    model.add_row(["1/2", -90, "-1/50", 3], "<=", 0)
    model.add_row([0, 0, 1, 0], "<=", 1)
    res = solve_lp(model)
    assert res.status is Status.OPTIMAL and res.value == Fraction(-1, 20)


def test_lp_format_round_trip():
    model = build_p0(inst(EX1_A, (11,), ConstraintSet.nonneg_box(4, 3), "l0"))
    again = parse_lp(dump_lp(model))
    assert dump_lp(again) == dump_lp(model)
    assert solve_milp(again).value == solve_milp(model).value


def _random_bounded_lp(rng):
    m, n = rng.randint(1, 3), rng.randint(2, 5)
    model = LpModel(sense=rng.choice(["min", "max"]))
    for _ in range(n):
        model.add_var(lower=rng.randint(-2, 0), upper=rng.randint(1, 3), cost=rng.randint(-3, 3))
    for _ in range(m):
        model.add_row([rng.randint(-3, 3) for _ in range(n)], rng.choice(["<=", ">=", "=="]),
                      rng.randint(-3, 3))
    return model


def test_lp_agrees_with_scipy():
    linprog = pytest.importorskip("scipy.optimize").linprog
    rng = random.Random(11)
    checked = 0
    for _ in range(150):
        model = _random_bounded_lp(rng)
        ours = solve_lp(model)
        sign = 1 if model.sense == "min" else -1
        A_ub, b_ub, A_eq, b_eq = [], [], [], []
        for row in model.rows:
            coeffs = [float(c) for c in row.coeffs]
            if row.relation == "==":
                A_eq.append(coeffs), b_eq.append(float(row.rhs))
            elif row.relation == "<=":
                A_ub.append(coeffs), b_ub.append(float(row.rhs))
            else:
                A_ub.append([-c for c in coeffs]), b_ub.append(-float(row.rhs))
        ref = linprog([sign * float(c) for c in model.objective], A_ub=A_ub or None,
                      b_ub=b_ub or None, A_eq=A_eq or None, b_eq=b_eq or None,
                      bounds=list(zip(map(float, model.lower), map(float, model.upper))),
                      method="highs")
        if ref.status == 0:
            assert ours.status is Status.OPTIMAL
            assert abs(float(ours.value) - sign * ref.fun) < 1e-7
            assert model.is_feasible(ours.solution)
            checked += 1
        elif ref.status == 2:
            assert ours.status is Status.INFEASIBLE
    assert checked > 50


# ------------------------------------------------------------ branch and bound

def test_milp_examples():
    p1 = solve_milp(build_p1(inst(EX1_A, (11,), Z3P), bounds="auto"))
    assert p1.status is Status.OPTIMAL and p1.value == 3
    assert tuple(p1.solution) == (1, 1, 1)
    p0 = solve_instance(inst(EX1_A, (11,), Z3P, "l0"))
    assert p0.value == 2 and p0.solution in {(4, 1, 0), (1, 3, 0)}
    assert solve_instance(inst(CYCLIC, (1, 1, 1), Z3P)).status is Status.INFEASIBLE


def test_milp_requires_bounded_integers():
    model = LpModel()
    model.add_var("x", 0, None, integer=True, cost=1)
    with pytest.raises(UnboundedIntegral):
        solve_milp(model)


def test_unbounded_sets_need_bounds():
    with pytest.raises(MissingBounds):
        build_p0(inst(EX1_A, (11,), Z3P, "l0"))


def test_milp_cutoff_stops_at_first_good_incumbent():
    A = M([[1, 1, 0, 0], [0, 0, 1, 1]])  # columns 1,2 and 3,4 coincide pairwise
    res = solve_milp(build_goodness_binary(A, 2), cutoff=0)
    assert res.value > 0


def test_p1_examples_five_by_six():
    b = (1,) * 5
    z = solve_instance(inst(FIVE_BY_SIX, b, ConstraintSet.nonneg_integers(6)))
    assert z.value == 4 and z.solution == (1, 0, 0, 1, 1, 1)
    r = solve_instance(inst(FIVE_BY_SIX, b, ConstraintSet.nonneg_reals(6)))
    assert r.value == Fraction(3, 2)
    assert r.solution == (Fraction(1, 2),) * 3 + (0, 0, 0)


def test_p0_binary_collapses_indicators():
    A = M([[1, 1, 0], [0, 1, 1]])
    model = build_p0(inst(A, (1, 1), ConstraintSet.binary(3), "l0"))
    assert model.num_vars == 3 and all(model.integer)
    assert model.objective == [1, 1, 1]


def test_p0_relaxed_signal_keeps_integral_indicators():
    model = build_p0(inst(EX1_A, (11,), ConstraintSet.real_box(0, [2, 2, 2]), "l0"))
    assert model.integer == [False] * 3 + [True] * 3
    res = solve_milp(model)
    # the continuous signal (0, 0, 11/6) has a single nonzero
    assert res.status is Status.OPTIMAL and res.value == 1
    assert model.signal_of(res.solution) == (0, 0, Fraction(11, 6))


def test_table_iii_row_shape():
    # 32x64 binary matrix, x~ in [0,2]^64 with 12 nonzeros: P0 recovers sparsity 12.
    rng = random.Random(12)
    A = seeded_matrix(rng, 32, 64, 0, 1)
    xt = [0] * 64
    for i in rng.sample(range(64), 12):
        xt[i] = rng.randint(1, 2)
    res = solve_instance(inst(A, A.matvec(xt), ConstraintSet.nonneg_box(2, 64), "l0"))
    assert res.value == 12


# ----------------------------------------------------------- goodness models

DUP = M([[1, 1, 0, 2], [0, 0, 1, 1]])  # columns 1 and 2 are equal


@pytest.mark.parametrize("A", [DUP, EX1_A, RationalMatrix.identity(3)])
def test_goodness_models_at_order_zero(A):
    assert solve_milp(build_goodness_binary(A, 0)).value == 0
    assert solve_milp(build_goodness_binary_alt(A, 0)).status is Status.INFEASIBLE
    assert solve_milp(build_goodness_unit_box(A, 0)).value == 0
    assert solve_milp(build_goodness_general(A, 0, -1, [1] * A.n)).status is Status.INFEASIBLE


def test_duplicate_columns_break_order_one():
    res = solve_milp(build_goodness_binary(DUP, 1))
    assert res.value == 2
    v = [res.solution[i] - res.solution[4 + i] for i in range(4)]
    assert sorted(v) == [-1, 0, 0, 1] and v[2] == v[3] == 0
    alt = solve_milp(build_goodness_binary_alt(DUP, 1))
    assert alt.status is Status.OPTIMAL and alt.value == 2


def test_unit_box_goodness_on_identity():
    for s in range(4):
        assert solve_milp(build_goodness_unit_box(RationalMatrix.identity(3), s)).value == 0


def test_general_model_single_row():
    assert solve_milp(build_goodness_general(M([[1, 2]]), 1, -1, [1, 1])).status \
        is Status.INFEASIBLE


def test_binary_goodness_is_monotone_in_s():
    rng = random.Random(3)
    for _ in range(15):
        A = seeded_matrix(rng, 3, 6, 0, 1)
        values = [solve_milp(build_goodness_binary(A, s)).value for s in range(4)]
        assert values == sorted(values)


def test_goodness_variants_agree_with_each_other_and_the_oracle():
    rng = random.Random(8)
    for _ in range(40):
        A = seeded_matrix(rng, rng.randint(2, 3), 6, 0, 1)
        s = rng.randint(1, 2)
        v1 = solve_milp(build_goodness_binary(A, s)).value == 0
        v2 = solve_milp(build_goodness_binary_alt(A, s)).status is Status.INFEASIBLE
        v3 = solve_milp(build_goodness_general(A, s, 0, [1] * 6)).status is Status.INFEASIBLE
        oracle = brute_goodness(A, s, ConstraintSet.binary(6)).good
        assert v1 == v2 == v3 == oracle


def test_general_model_matches_kernel_enumeration():
    rng = random.Random(21)
    for _ in range(60):
        n = rng.randint(2, 5)
        A = seeded_matrix(rng, rng.randint(1, 2), n, -3, 3)
        lower = [-rng.randint(0, 2) for _ in range(n)]
        upper = [rng.randint(1, 2) for _ in range(n)]
        s = rng.randint(1, n)
        box = ([l - u for l, u in zip(lower, upper)], [u - l for l, u in zip(lower, upper)])
        expected = not any(any(z) and in_C(z, s, lower, upper)
                           for z in brute_kernel_points(A, box))
        res = solve_milp(build_goodness_general(A, s, lower, upper))
        assert (res.status is Status.INFEASIBLE) == expected
        if res.status is Status.OPTIMAL:
            z = [res.solution[i] for i in range(n)]
            assert any(z) and in_C(z, s, lower, upper) and not any(A.matvec(z))


# ------------------------------------------------------------ uniqueness cuts

def test_cut_leaves_the_second_optimum():
    model = build_p0(inst(EX1_A, (11,), ConstraintSet.nonneg_box(4, 3), "l0"))
    cut = add_uniqueness_cut(model, (4, 1, 0), pin=2)
    res = solve_milp(cut)
    assert res.status is Status.OPTIMAL
    assert model.signal_of(res.solution) == (1, 3, 0)
    again = add_uniqueness_cut(cut, (1, 3, 0))
    assert solve_milp(again).status is Status.INFEASIBLE


def test_cut_on_unique_binary_optimum_is_infeasible():
    A = M([[1, 0, 1], [0, 1, 1]])
    model = build_p0(inst(A, (1, 1), ConstraintSet.binary(3), "l0"))
    res = solve_milp(model)
    assert res.value == 1 and model.signal_of(res.solution) == (0, 0, 1)
    assert solve_milp(add_uniqueness_cut(model, res.solution, pin=1)).status \
        is Status.INFEASIBLE
    assert unique_optimum(model, res)


def test_cut_rejects_infeasible_points():
    model = build_p0(inst(EX1_A, (11,), ConstraintSet.nonneg_box(4, 3), "l0"))
    with pytest.raises(InfeasiblePoint):
        add_uniqueness_cut(model, (1, 0, 0))


def test_pin_fixes_objective_value():
    model = build_p1(inst(EX1_A, (11,), ConstraintSet.nonneg_box(4, 3)))
    assert solve_milp(pin_objective(model, 2)).status is Status.INFEASIBLE
    assert solve_milp(pin_objective(model, 4)).value == 4


def test_continuous_uniqueness_probes():
    r = solve_instance(inst(EX1_A, (11,), ConstraintSet.nonneg_reals(3)), uniqueness=True)
    assert r.unique is True
    r0 = solve_instance(inst(EX1_A, (11,), ConstraintSet.nonneg_reals(3), "l0"),
                        uniqueness=True)
    assert r0.value == 1 and r0.unique is False


# ------------------------------------------------------------------ properties

@st.composite
def bounded_instances(draw):
    A = draw(matrices(max_m=2, max_n=4, lo=-2, hi=2))
    n = A.n
    x = draw(st.lists(st.integers(-2, 2), min_size=n, max_size=n))
    X = draw(st.sampled_from([ConstraintSet.symmetric_box(2, n), ConstraintSet.box(-1, [2] * n)]))
    x = [min(max(v, int(lo)), int(hi)) for v, lo, hi in zip(x, *X.bounds())]
    return inst(A, A.matvec(x), X, draw(st.sampled_from(["l0", "l1"])))


@given(bounded_instances())
def test_milp_dominates_its_relaxation_and_returns_feasible_points(instance):
    from intsparse.milp.builders import build_model
    model = build_model(instance)
    res = solve_milp(model)
    lp = solve_lp(model.relaxation())
    assert res.status is Status.OPTIMAL  # the generating point is feasible
    assert res.value >= lp.value
    assert model.is_feasible(res.solution)
    assert all(res.solution[j].denominator == 1 for j in range(model.num_vars) if model.integer[j])
    assert model.objective_value(res.solution) == res.value
    assert instance.is_feasible(model.signal_of(res.solution))


def _network_matrix(rng, nodes, arcs):
    """Node-arc incidence matrix of a random digraph, one node row removed."""
    cols = []
    while len(cols) < arcs:
        a, b = rng.sample(range(nodes), 2)
        col = [0] * nodes
        col[a], col[b] = 1, -1
        cols.append(col)
    rows = [[c[i] for c in cols] for i in range(nodes - 1)]
    return M(rows)


def test_network_matrix_relaxations_have_integral_vertices():
    from intsparse.linalg import is_totally_unimodular
    rng = random.Random(41)
    solved = 0
    for _ in range(40):
        A = _network_matrix(rng, rng.randint(3, 5), rng.randint(4, 7))
        assert is_totally_unimodular(A)
        x = [rng.randint(0, 3) for _ in range(A.n)]
        for X in (ConstraintSet.nonneg_reals(A.n), ConstraintSet.reals(A.n)):
            res = solve_lp(build_p1(inst(A, A.matvec(x), X)))
            assert res.status is Status.OPTIMAL
            assert all(v.denominator == 1 for v in res.solution)
            solved += 1
    assert solved == 80
