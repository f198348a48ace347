"""Exact linear algebra: echelon forms, kernels, Hermite normal form, spark
and determinant-based unimodularity tests.

HNF convention: column style.  ``H = A @ U`` with ``U`` unimodular; ``H`` is
lower (column) echelon: the pivot of column ``k`` sits in row ``p_k`` with
``p_0 < p_1 < ...``, pivots are positive, entries right of a pivot are zero
and entries left of a pivot in its row lie in ``[0, pivot)``.  Trailing
columns of ``H`` are zero when ``A`` is rank deficient, and the matching
columns of ``U`` generate ``ker(A) ∩ Z^n``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import RationalMatrix, primitive_integer_vector

DEFAULT_MAX_COLUMNS = 20


class DimensionError(ValueError):
    pass


# --------------------------------------------------------------------------
# elimination
# --------------------------------------------------------------------------

def rref(rows: Sequence[Sequence]) -> tuple:
    """Reduced row echelon form over Q.  Returns (rows, pivot_columns)."""
    R = [[Fraction(v) for v in r] for r in rows]
    if not R:
        return R, []
    m, n = len(R), len(R[0])
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [v * inv for v in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def _int_rank(rows: list) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    M = [list(r) for r in rows]
    if not M:
        return 0
    m, n = len(M), len(M[0])
    rank, prev = 0, 1
    for c in range(n):
        p = next((i for i in range(rank, m) if M[i][c] != 0), None)
        if p is None:
            continue
        M[rank], M[p] = M[p], M[rank]
        piv = M[rank][c]
        for i in range(rank + 1, m):
            f = M[i][c]
            M[i] = [(a * piv - f * b) // prev for a, b in zip(M[i], M[rank])]
        prev = piv
        rank += 1
        if rank == m:
            break
    return rank


def rank(A: RationalMatrix) -> int:
    return _int_rank(A.scaled_int_rows())


def determinant(M: Sequence[Sequence]) -> Fraction:
    """Exact determinant via Bareiss fraction-free elimination."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in M):
        raise DimensionError("determinant of a non-square matrix")
    scale = 1
    rows = []
    for r in M:
        k = 1
        for v in r:
            k = math.lcm(k, Fraction(v).denominator)
        rows.append([int(Fraction(v) * k) for v in r])
        scale *= k
    return Fraction(_bareiss_det(rows), scale)


def _bareiss_det(rows: list) -> int:
    M = [list(r) for r in rows]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            p = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if p is None:
                return 0
            M[k], M[p] = M[p], M[k]
            sign = -sign
        piv = M[k][k]
        for i in range(k + 1, n):
            Mi, Mk = M[i], M[k]
            f = Mi[k]
            for j in range(k + 1, n):
                Mi[j] = (Mi[j] * piv - f * Mk[j]) // prev
        prev = piv
    return sign * M[n - 1][n - 1]


# --------------------------------------------------------------------------
# Hermite normal form
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HnfResult:
    H: RationalMatrix
    U: RationalMatrix
    pivot_rows: tuple  # pivot row of each nonzero column of H
    rank: int


def _column_hnf(M: list) -> tuple:
    """Column-style HNF of an integer matrix given as rows; returns (H, U, pivots)."""
    m, n = len(M), len(M[0])
    H = [list(r) for r in M]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def combine(k, j, a, b, c, d):
        # (col_k, col_j) <- (a*col_k + b*col_j, c*col_k + d*col_j), ad - bc = ±1
        for T in (H, U):
            for row in T:
                x, y = row[k], row[j]
                row[k] = a * x + b * y
                row[j] = c * x + d * y

    def add_multiple(j, k, q):
        # col_j -= q * col_k
        for T in (H, U):
            for row in T:
                row[j] -= q * row[k]

    pivots = []
    k = 0
    for i in range(m):
        if k == n:
            break
        for j in range(k + 1, n):
            b = H[i][j]
            if b == 0:
                continue
            a = H[i][k]
            g, x, y = _xgcd(a, b)
            combine(k, j, x, y, -b // g, a // g)
        if H[i][k] == 0:
            continue
        if H[i][k] < 0:
            for T in (H, U):
                for row in T:
                    row[k] = -row[k]
        piv = H[i][k]
        for j in range(k):
            q = H[i][j] // piv
            if q:
                add_multiple(j, k, q)
        pivots.append(i)
        k += 1
    return H, U, pivots


def _xgcd(a: int, b: int) -> tuple:
    """g = gcd(a, b) >= 0 and x, y with a*x + b*y = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hermite_normal_form(A: RationalMatrix) -> HnfResult:
    if not A.is_integral():
        raise ValueError("hermite_normal_form needs an integral matrix")
    H, U, pivots = _column_hnf(A.int_rows())
    return HnfResult(RationalMatrix.from_rows(H), RationalMatrix.from_rows(U),
                     tuple(pivots), len(pivots))


def integral_solution(A: RationalMatrix, b: Sequence) -> tuple | None:
    """Some x in Z^n with Ax = b, or None if there is none."""
    rows, rhs = [], []
    for r, bi in zip(A.rows, b):
        k = 1
        for v in list(r) + [Fraction(bi)]:
            k = math.lcm(k, Fraction(v).denominator)
        rows.append([int(v * k) for v in r])
        rhs.append(Fraction(bi) * k)
    H, U, pivots = _column_hnf(rows)
    n = A.n
    y = [0] * n
    for k, p in enumerate(pivots):
        acc = rhs[p] - sum(H[p][j] * y[j] for j in range(k))
        q, r = divmod(acc, H[p][k])
        if r != 0:
            return None
        y[k] = int(q)
    if any(sum(H[i][j] * y[j] for j in range(n)) != rhs[i] for i in range(len(rows))):
        return None
    return tuple(Fraction(sum(U[i][j] * y[j] for j in range(n))) for i in range(n))


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelBasis:
    vectors: tuple               # rational basis of ker(A)
    integral_lattice_basis: tuple  # basis of ker(A) ∩ Z^n, column echelon

    @property
    def dimension(self) -> int:
        return len(self.vectors)


def kernel_basis(A: RationalMatrix) -> KernelBasis:
    R, pivots = rref(A.rows)
    n = A.n
    free = [j for j in range(n) if j not in pivots]
    vectors = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        vectors.append(tuple(v))
    return KernelBasis(tuple(vectors), lattice_kernel_basis(A))


def lattice_kernel_basis(A: RationalMatrix) -> tuple:
    """Basis of ker(A) ∩ Z^n in column-echelon (HNF) form.

    Trailing columns of the unimodular HNF transform span the integer
    kernel; a second HNF puts them in echelon form so coordinates can be
    enumerated one pivot at a time.
    """
    rows = A.scaled_int_rows()
    _, U, pivots = _column_hnf(rows)
    r, n = len(pivots), A.n
    if r == n:
        return ()
    K = [[U[i][j] for j in range(r, n)] for i in range(n)]
    HK, _, _ = _column_hnf(K)
    k = n - r
    return tuple(tuple(HK[i][j] for i in range(n)) for j in range(k))


def null_vector(cols: Sequence[Sequence]) -> tuple | None:
    """A primitive integral nonzero x with sum_j x_j * cols[j] = 0, if any."""
    M = RationalMatrix(tuple(zip(*cols)))
    basis = kernel_basis(M).vectors
    if not basis:
        return None
    return primitive_integer_vector(basis[0])


# --------------------------------------------------------------------------
# spark and unimodularity
# --------------------------------------------------------------------------

def _check_columns(n: int, max_columns: int | None):
    limit = DEFAULT_MAX_COLUMNS if max_columns is None else max_columns
    if n > limit:
        raise DimensionError(
            f"{n} columns exceed the exhaustive-search limit of {limit}; "
            "raise max_columns to force it")


def spark_with_witness(A: RationalMatrix, max_columns: int | None = None) -> tuple:
    """(spark, witness) where witness is a primitive integral kernel vector
    with exactly ``spark`` nonzeros, or (math.inf, None)."""
    _check_columns(A.n, max_columns)
    rows = A.scaled_int_rows()
    cols = [[r[j] for r in rows] for j in range(A.n)]
    r = _int_rank(rows)
    for k in range(1, min(r + 1, A.n) + 1):
        for subset in itertools.combinations(range(A.n), k):
            sub = [list(x) for x in zip(*(cols[j] for j in subset))]
            if _int_rank(sub) < k:
                coeffs = null_vector([cols[j] for j in subset])
                w = [0] * A.n
                for j, c in zip(subset, coeffs):
                    w[j] = c
                return k, tuple(Fraction(v) for v in w)
    return math.inf, None


def spark(A: RationalMatrix, max_columns: int | None = None):
    return spark_with_witness(A, max_columns)[0]


def is_unimodular(A: RationalMatrix, max_columns: int | None = None) -> bool:
    """Every nonsingular m x m submatrix has determinant ±1."""
    if not A.is_integral():
        raise ValueError("unimodularity is defined for integral matrices")
    m, n = A.shape
    if m > n:
        raise DimensionError(f"unimodularity needs m <= n, got {m}x{n}")
    _check_columns(n, max_columns)
    rows = A.int_rows()
    for subset in itertools.combinations(range(n), m):
        d = _bareiss_det([[r[j] for j in subset] for r in rows])
        if d not in (0, 1, -1):
            return False
    return True


def is_totally_unimodular(A: RationalMatrix, max_columns: int | None = None) -> bool:
    """Every square submatrix has determinant 0 or ±1."""
    if not A.is_integral():
        return False
    rows = A.int_rows()
    if any(v not in (-1, 0, 1) for r in rows for v in r):
        return False
    m, n = A.shape
    _check_columns(n, max_columns)
    for k in range(2, min(m, n) + 1):
        for rs in itertools.combinations(range(m), k):
            sub_rows = [rows[i] for i in rs]
            for cs in itertools.combinations(range(n), k):
                if _bareiss_det([[r[j] for j in cs] for r in sub_rows]) not in (0, 1, -1):
                    return False
    return True
