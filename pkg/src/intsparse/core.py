"""Exact rational vocabulary shared by every other module.

Scalars are :class:`fractions.Fraction`; vectors are tuples of Fractions;
matrices are :class:`RationalMatrix`.  Indices handed to users (supports,
witness supports, file formats) are 1-based; everything inside the package
works with 0-based Python indices.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]


# --------------------------------------------------------------------------
# scalars and vectors
# --------------------------------------------------------------------------

def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` (ints and Fractions pass through)."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("floats are not accepted; pass 'p/q' strings")
    return Fraction(str(text).strip())


def format_rational(q) -> str:
    return str(Fraction(q))


def as_vector(values: Iterable) -> tuple:
    return tuple(parse_rational(v) for v in values)


def is_integral_value(q) -> bool:
    return Fraction(q).denominator == 1


def l0_norm(x: Sequence) -> int:
    return sum(1 for v in x if v != 0)


def l1_norm(x: Sequence) -> Fraction:
    return sum((abs(Fraction(v)) for v in x), Fraction(0))


def lcm_of_denominators(values: Iterable) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


def primitive_integer_vector(v: Sequence) -> tuple:
    """Scale a nonzero rational vector to the integral vector with gcd 1."""
    scale = lcm_of_denominators(v)
    ints = [int(Fraction(x) * scale) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


@dataclass(frozen=True)
class Support:
    """Sorted, duplicate-free set of 1-based coordinate indices."""

    indices: tuple = ()

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 1 for i in idx):
            raise ValueError("support indices are 1-based")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError("support indices must be strictly increasing")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, indices: Iterable[int]) -> "Support":
        return cls(tuple(sorted(set(int(i) for i in indices))))

    @classmethod
    def from_zero_based(cls, indices: Iterable[int]) -> "Support":
        return cls.of(i + 1 for i in indices)

    @classmethod
    def of_vector(cls, x: Sequence) -> "Support":
        return cls.from_zero_based(i for i, v in enumerate(x) if v != 0)

    def zero_based(self) -> tuple:
        return tuple(i - 1 for i in self.indices)

    def complement(self, n: int) -> "Support":
        own = set(self.indices)
        return Support(tuple(i for i in range(1, n + 1) if i not in own))

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i):
        return i in self.indices


def restrict_support(x: Sequence, support: Support) -> tuple:
    n = len(x)
    if support.indices and support.indices[-1] > n:
        raise ValueError(f"support {support.indices} exceeds dimension {n}")
    keep = set(support.zero_based())
    return tuple(Fraction(v) if i in keep else Fraction(0) for i, v in enumerate(x))


# --------------------------------------------------------------------------
# matrices
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalMatrix:
    """Dense row-major matrix of exact rationals (m, n >= 1)."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(as_vector(r) for r in self.rows)
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and one column")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ValueError("ragged matrix rows")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, rows) -> "RationalMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple:
        return self.m, self.n

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list:
        return [self.column(j) for j in range(self.n)]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(tuple(zip(*self.rows)))

    def matvec(self, x: Sequence) -> tuple:
        if len(x) != self.n:
            raise ValueError(f"vector of length {len(x)} for {self.m}x{self.n} matrix")
        return tuple(sum((a * b for a, b in zip(r, x) if a and b), Fraction(0))
                     for r in self.rows)

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if other.m != self.m:
            raise ValueError("row counts differ")
        return RationalMatrix(tuple(a + b for a, b in zip(self.rows, other.rows)))

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(tuple(tuple(-v for v in r) for r in self.rows))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix(tuple(tuple(self.rows[i][j] for j in cols) for i in rows))

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for r in self.rows for v in r)

    def int_rows(self) -> list:
        if not self.is_integral():
            raise ValueError("matrix has non-integral entries")
        return [[int(v) for v in r] for r in self.rows]

    def scaled_int_rows(self) -> list:
        """Rows multiplied by the lcm of their denominators (same kernel)."""
        out = []
        for r in self.rows:
            k = lcm_of_denominators(r)
            out.append([int(v * k) for v in r])
        return out

    # ---- text formats -------------------------------------------------
    def to_json(self) -> str:
        return json.dumps({"m": self.m, "n": self.n,
                           "entries": [[format_rational(v) for v in r] for r in self.rows]})

    @classmethod
    def from_json(cls, text: str) -> "RationalMatrix":
        data = json.loads(text)
        mat = cls(tuple(tuple(parse_rational(v) for v in r) for r in data["entries"]))
        if "m" in data and data["m"] != mat.m or "n" in data and data["n"] != mat.n:
            raise ValueError("declared shape does not match entries")
        return mat

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for r in self.rows:
            writer.writerow([format_rational(v) for v in r])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RationalMatrix":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        return cls(tuple(tuple(parse_rational(c) for c in r) for r in rows))


def read_matrix(path) -> RationalMatrix:
    with open(path) as fh:
        text = fh.read()
    if str(path).endswith(".json"):
        return RationalMatrix.from_json(text)
    return RationalMatrix.from_csv(text)


def read_vector(path) -> tuple:
    """Vector file: JSON list, JSON matrix with one row/column, or CSV."""
    with open(path) as fh:
        text = fh.read()
    if str(path).endswith(".json"):
        data = json.loads(text)
        if isinstance(data, list):
            return as_vector(data)
        mat = RationalMatrix.from_json(text)
    else:
        mat = RationalMatrix.from_csv(text)
    if mat.m == 1:
        return mat.rows[0]
    if mat.n == 1:
        return mat.column(0)
    raise ValueError(f"{path}: expected a vector, got a {mat.m}x{mat.n} matrix")


def vector_to_json(x: Sequence) -> list:
    return [format_rational(v) for v in x]


# --------------------------------------------------------------------------
# constraint sets
# --------------------------------------------------------------------------

class SetKind(enum.Enum):
    ALL_INTEGERS = "Z"
    NONNEG_INTEGERS = "Z+"
    BOX_INTEGERS = "box"
    SYMMETRIC_BOX_INTEGERS = "symbox"
    NONNEG_BOX_INTEGERS = "nnbox"
    BOX_REALS = "Rbox"
    NONNEG_REALS = "R+"
    ALL_REALS = "R"


_INTEGRAL_KINDS = {SetKind.ALL_INTEGERS, SetKind.NONNEG_INTEGERS, SetKind.BOX_INTEGERS,
                   SetKind.SYMMETRIC_BOX_INTEGERS, SetKind.NONNEG_BOX_INTEGERS}


@dataclass(frozen=True)
class ConstraintSet:
    """The signal set X.  Stored bounds are what the kind needs and no more:
    ``symbox`` and ``nnbox`` keep only ``upper``; box kinds keep both."""

    kind: SetKind
    n: int
    lower: tuple | None = None
    upper: tuple | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be positive")
        kind = self.kind
        integral = kind in _INTEGRAL_KINDS
        lower, upper = self.lower, self.upper
        if kind in (SetKind.BOX_INTEGERS, SetKind.BOX_REALS):
            if lower is None or upper is None:
                raise ValueError(f"{kind.value} needs lower and upper bounds")
        elif kind in (SetKind.SYMMETRIC_BOX_INTEGERS, SetKind.NONNEG_BOX_INTEGERS):
            if upper is None:
                raise ValueError(f"{kind.value} needs an upper bound")
            lower = None
        else:
            lower = upper = None
        if lower is not None:
            lower = _bound_vector(lower, self.n, math.ceil if integral else None)
        if upper is not None:
            upper = _bound_vector(upper, self.n, math.floor if integral else None)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        lo, hi = self.bounds()
        for i in range(self.n):
            if lo[i] is not None and lo[i] > 0 or hi[i] is not None and hi[i] < 0:
                raise ValueError(f"bounds must satisfy l <= 0 <= u (coordinate {i + 1})")
            if lo[i] is not None and hi[i] is not None and not lo[i] < hi[i]:
                raise ValueError(f"bounds must satisfy l < u (coordinate {i + 1})")

    # ---- constructors ---------------------------------------------------
    @classmethod
    def integers(cls, n):
        return cls(SetKind.ALL_INTEGERS, n)

    @classmethod
    def nonneg_integers(cls, n):
        return cls(SetKind.NONNEG_INTEGERS, n)

    @classmethod
    def box(cls, lower, upper):
        lower, upper = _broadcast(lower, upper)
        return cls(SetKind.BOX_INTEGERS, len(lower), lower, upper)

    @classmethod
    def symmetric_box(cls, upper, n=None):
        upper = _broadcast_one(upper, n)
        return cls(SetKind.SYMMETRIC_BOX_INTEGERS, len(upper), None, upper)

    @classmethod
    def nonneg_box(cls, upper, n=None):
        upper = _broadcast_one(upper, n)
        return cls(SetKind.NONNEG_BOX_INTEGERS, len(upper), None, upper)

    @classmethod
    def binary(cls, n):
        return cls.nonneg_box([1] * n)

    @classmethod
    def real_box(cls, lower, upper):
        lower, upper = _broadcast(lower, upper)
        return cls(SetKind.BOX_REALS, len(lower), lower, upper)

    @classmethod
    def nonneg_reals(cls, n):
        return cls(SetKind.NONNEG_REALS, n)

    @classmethod
    def reals(cls, n):
        return cls(SetKind.ALL_REALS, n)

    # ---- queries --------------------------------------------------------
    @property
    def is_integral(self) -> bool:
        return self.kind in _INTEGRAL_KINDS

    @property
    def is_bounded(self) -> bool:
        lo, hi = self.bounds()
        return all(v is not None for v in lo + hi)

    def bounds(self) -> tuple:
        """Effective (lower, upper) per coordinate; ``None`` means infinite."""
        n, kind = self.n, self.kind
        if kind in (SetKind.BOX_INTEGERS, SetKind.BOX_REALS):
            return self.lower, self.upper
        if kind is SetKind.SYMMETRIC_BOX_INTEGERS:
            return tuple(-u for u in self.upper), self.upper
        if kind is SetKind.NONNEG_BOX_INTEGERS:
            return (Fraction(0),) * n, self.upper
        if kind in (SetKind.NONNEG_INTEGERS, SetKind.NONNEG_REALS):
            return (Fraction(0),) * n, (None,) * n
        return (None,) * n, (None,) * n

    def is_binary(self) -> bool:
        lo, hi = self.bounds()
        return self.is_integral and all(l == 0 for l in lo) and all(u == 1 for u in hi)

    def with_bounds(self, lower, upper) -> "ConstraintSet":
        """Same integrality, explicit finite box (used to bound Z^n, Z^n_+)."""
        if self.is_integral:
            return ConstraintSet.box(lower, upper)
        return ConstraintSet.real_box(lower, upper)

    def describe(self) -> str:
        lo, hi = self.bounds()
        if self.kind in (SetKind.ALL_INTEGERS, SetKind.NONNEG_INTEGERS,
                         SetKind.NONNEG_REALS, SetKind.ALL_REALS):
            return f"{self.kind.value}^{self.n}"
        return (f"{self.kind.value}[{','.join(map(str, lo))} .. "
                f"{','.join(map(str, hi))}]")


def _bound_vector(values, n, rounding):
    vals = as_vector(values)
    if len(vals) != n:
        raise ValueError(f"bound vector of length {len(vals)}, expected {n}")
    if rounding is None:
        return vals
    return tuple(Fraction(rounding(v)) for v in vals)


def _broadcast(lower, upper):
    lo_seq = not isinstance(lower, (int, Fraction, str))
    hi_seq = not isinstance(upper, (int, Fraction, str))
    if lo_seq and hi_seq:
        return list(lower), list(upper)
    if lo_seq:
        return list(lower), [upper] * len(lower)
    if hi_seq:
        return [lower] * len(upper), list(upper)
    raise ValueError("at least one bound must be a vector to fix the dimension")


def _broadcast_one(upper, n):
    if isinstance(upper, (int, Fraction, str)):
        if n is None:
            raise ValueError("scalar bound needs the dimension n")
        return [upper] * n
    return list(upper)


def membership(x: Sequence, X: ConstraintSet) -> bool:
    if len(x) != X.n:
        raise ValueError(f"vector of length {len(x)} for a set of dimension {X.n}")
    xs = as_vector(x)
    if X.is_integral and any(v.denominator != 1 for v in xs):
        return False
    lo, hi = X.bounds()
    return all((l is None or v >= l) and (u is None or v <= u)
               for v, l, u in zip(xs, lo, hi))


# --------------------------------------------------------------------------
# instances and results
# --------------------------------------------------------------------------

class Objective(enum.Enum):
    L0 = "l0"
    L1 = "l1"


@dataclass(frozen=True)
class RecoveryInstance:
    A: RationalMatrix
    b: tuple
    X: ConstraintSet
    objective: Objective = Objective.L0

    def __post_init__(self):
        b = as_vector(self.b)
        object.__setattr__(self, "b", b)
        if len(b) != self.A.m:
            raise ValueError(f"b has length {len(b)}, A has {self.A.m} rows")
        if self.X.n != self.A.n:
            raise ValueError(f"X has dimension {self.X.n}, A has {self.A.n} columns")

    def objective_value(self, x: Sequence):
        return Fraction(l0_norm(x)) if self.objective is Objective.L0 else l1_norm(x)

    def is_feasible(self, x: Sequence) -> bool:
        return membership(x, self.X) and self.A.matvec(as_vector(x)) == self.b


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    # search stopped early (objective cutoff or limit) with an incumbent
    FEASIBLE = "feasible"
    # search stopped by a limit without any incumbent
    LIMIT = "limit"


@dataclass
class SolveResult:
    status: Status
    value: Fraction | None = None
    solution: tuple | None = None
    unique: bool | None = None
    nodes_explored: int = 0
    # filled by exhaustive oracles only
    optima: tuple | None = None
    lp_iterations: int = 0
    info: dict = field(default_factory=dict)

    @property
    def is_optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    @property
    def optimal_count(self):
        return None if self.optima is None else len(self.optima)


class BudgetExceeded(RuntimeError):
    """An exhaustive search would exceed its configured budget."""
