from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from intsparse.core import (ConstraintSet, Objective, RationalMatrix, RecoveryInstance,
                            SetKind, Support, format_rational, l0_norm, l1_norm,
                            membership, parse_rational, primitive_integer_vector,
                            read_matrix, read_vector, restrict_support)

from strategies import EX1_A, frac_vectors, matrices


@pytest.mark.parametrize("x, expected", [((4, 1, 0), 2), ((0, 0, 0), 0), ((1, 1, 1), 3)])
def test_l0_norm(x, expected):
    assert l0_norm(x) == expected


@pytest.mark.parametrize("x, expected", [
    ((1, 1, 1), 3), ((0, 0, 0), 0), ((0, 0, Fraction(11, 6)), Fraction(11, 6)),
])
def test_l1_norm(x, expected):
    assert l1_norm(x) == expected


@pytest.mark.parametrize("x, S, expected", [
    ((1, 2, 3), (1, 3), (1, 0, 3)),
    ((1, 2, 3), (), (0, 0, 0)),
    ((-2, 1), (2,), (0, 1)),
])
def test_restrict_support(x, S, expected):
    assert restrict_support(x, Support.of(S)) == expected


def test_restrict_support_rejects_out_of_range():
    with pytest.raises(ValueError):
        restrict_support((1, 2), Support.of([3]))


@pytest.mark.parametrize("x, X, expected", [
    ((1, 3, 0), ConstraintSet.nonneg_integers(3), True),
    ((0, 0, Fraction(11, 6)), ConstraintSet.nonneg_integers(3), False),
    ((0, 0, Fraction(11, 6)), ConstraintSet.nonneg_reals(3), True),
    ((-1, 0, 2), ConstraintSet.box([-1, -1, 0], [1, 1, 2]), True),
    ((-1, 0, 3), ConstraintSet.box([-1, -1, 0], [1, 1, 2]), False),
    ((-2, 2), ConstraintSet.symmetric_box(2, 2), True),
    ((-1, 1), ConstraintSet.binary(2), False),
])
def test_membership(x, X, expected):
    assert membership(x, X) is expected


@pytest.mark.parametrize("X", [
    ConstraintSet.integers(3), ConstraintSet.nonneg_integers(3), ConstraintSet.binary(3),
    ConstraintSet.symmetric_box(2, 3), ConstraintSet.nonneg_box([1, 2, 3]),
    ConstraintSet.box([-1, 0, -3], [1, 1, 1]), ConstraintSet.real_box(-1, [1, 2, 3]),
    ConstraintSet.nonneg_reals(3), ConstraintSet.reals(3),
])
def test_zero_is_always_a_member(X):
    assert membership((0, 0, 0), X)


def test_box_bounds_round_inward():
    X = ConstraintSet.box(["-3/2", "-1/3"], ["5/2", 1])
    assert X.bounds() == ((-1, 0), (2, 1))
    # real boxes keep their rational bounds
    R = ConstraintSet.real_box(["-3/2"], ["5/2"])
    assert R.bounds() == ((Fraction(-3, 2),), (Fraction(5, 2),))


@pytest.mark.parametrize("lower, upper", [([1, -1], [2, 1]), ([-1, -1], [1, -1]),
                                          ([0, 0], [0, 1])])
def test_box_requires_l_le_0_le_u_and_l_lt_u(lower, upper):
    with pytest.raises(ValueError):
        ConstraintSet.box(lower, upper)


def test_symmetric_box_stores_only_upper():
    X = ConstraintSet.symmetric_box([1, 2])
    assert X.kind is SetKind.SYMMETRIC_BOX_INTEGERS
    assert X.lower is None
    assert X.bounds() == ((-1, -2), (1, 2))
    assert ConstraintSet.binary(3).is_binary()


def test_support_validation():
    assert Support.of([3, 1]).indices == (1, 3)
    assert Support.of_vector((0, 5, 0, -1)).indices == (2, 4)
    assert Support.from_zero_based([0, 2]).indices == (1, 3)
    assert Support.of([1, 3]).complement(4).indices == (2, 4)
    with pytest.raises(ValueError):
        Support.of([0])


def test_instance_validation():
    with pytest.raises(ValueError):
        RecoveryInstance(EX1_A, (1, 2), ConstraintSet.nonneg_integers(3), Objective.L0)
    with pytest.raises(ValueError):
        RecoveryInstance(EX1_A, (11,), ConstraintSet.nonneg_integers(4), Objective.L0)
    inst = RecoveryInstance(EX1_A, (11,), ConstraintSet.nonneg_integers(3), Objective.L1)
    assert inst.is_feasible((1, 1, 1))
    assert not inst.is_feasible((0, 0, Fraction(11, 6)))
    assert inst.objective_value((1, 3, 0)) == 4


def test_rationals_reject_floats():
    with pytest.raises(TypeError):
        parse_rational(0.5)


def test_matrix_shape_and_products():
    A = RationalMatrix.from_rows([[1, "1/2"], [0, -3]])
    assert A.shape == (2, 2)
    assert A.matvec((2, 4)) == (4, -12)
    assert A.transpose().rows == ((1, 0), (Fraction(1, 2), -3))
    with pytest.raises(ValueError):
        RationalMatrix.from_rows([[1, 2], [3]])


def test_matrix_files_round_trip(tmp_path):
    A = RationalMatrix.from_rows([[1, "-2/3", 0], [5, 7, "1/9"]])
    (tmp_path / "a.json").write_text(A.to_json())
    (tmp_path / "a.csv").write_text(A.to_csv())
    assert read_matrix(tmp_path / "a.json") == A
    assert read_matrix(tmp_path / "a.csv") == A
    (tmp_path / "b.json").write_text('["1/2", "3"]')
    assert read_vector(tmp_path / "b.json") == (Fraction(1, 2), 3)


def test_primitive_integer_vector():
    assert primitive_integer_vector((Fraction(1, 2), Fraction(-3, 4), 0)) == (2, -3, 0)
    assert primitive_integer_vector((4, 6)) == (2, 3)


@given(st.integers(-10**30, 10**30), st.integers(1, 10**12))
def test_rational_text_round_trip(p, q):
    r = Fraction(p, q)
    assert parse_rational(format_rational(r)) == r
    assert format_rational(parse_rational(format_rational(r))) == format_rational(r)


@given(frac_vectors(6))
def test_norm_invariants(x):
    assert 0 <= l0_norm(x) <= len(x)
    assert l1_norm(x) >= 0
    zero = all(v == 0 for v in x)
    assert (l0_norm(x) == 0) == zero == (l1_norm(x) == 0)


@given(frac_vectors(6), st.sets(st.integers(1, 6)))
def test_restrict_support_partition(x, S):
    S = Support.of(S)
    on, off = restrict_support(x, S), restrict_support(x, S.complement(6))
    assert tuple(a + b for a, b in zip(on, off)) == tuple(x)


@given(matrices(max_m=3, max_n=5))
def test_matrix_text_round_trip(A):
    assert RationalMatrix.from_json(A.to_json()) == A
    assert RationalMatrix.from_csv(A.to_csv()) == A
