"""Linear / mixed-integer model container and its LP-style text format."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from ..core import format_rational, parse_rational

RELATIONS = ("<=", ">=", "==")


class UnboundedIntegral(ValueError):
    """An integer variable lacks a finite lower or upper bound."""


@dataclass(frozen=True)
class Row:
    coeffs: tuple
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    def activity(self, x: Sequence) -> Fraction:
        return sum((c * v for c, v in zip(self.coeffs, x) if c), Fraction(0))

    def satisfied(self, x: Sequence) -> bool:
        a = self.activity(x)
        if self.relation == "<=":
            return a <= self.rhs
        if self.relation == ">=":
            return a >= self.rhs
        return a == self.rhs


@dataclass
class LpModel:
    """min/max c'x subject to rows, bounds and an integrality mask.

    ``signal`` optionally maps the model back to a signal vector: entry
    ``(p, q)`` means ``signal_i = var[p] - var[q]`` (``q`` may be None).
    """

    sense: str = "min"
    objective: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    lower: list = field(default_factory=list)
    upper: list = field(default_factory=list)
    integer: list = field(default_factory=list)
    names: list = field(default_factory=list)
    row_names: list = field(default_factory=list)
    signal: tuple | None = None

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def add_var(self, name=None, lower=0, upper=None, integer=False, cost=0) -> int:
        j = len(self.objective)
        self.objective.append(Fraction(cost))
        self.lower.append(None if lower is None else Fraction(lower))
        self.upper.append(None if upper is None else Fraction(upper))
        self.integer.append(bool(integer))
        self.names.append(name or f"v{j + 1}")
        for k, row in enumerate(self.rows):
            self.rows[k] = Row(row.coeffs + (Fraction(0),), row.relation, row.rhs)
        return j

    def add_row(self, coeffs, relation, rhs, name=None) -> int:
        """``coeffs`` is a dense sequence or a {var index: coefficient} dict."""
        if isinstance(coeffs, dict):
            dense = [Fraction(0)] * self.num_vars
            for j, c in coeffs.items():
                dense[j] += Fraction(c)
            coeffs = dense
        if len(coeffs) != self.num_vars:
            raise ValueError(f"row of length {len(coeffs)} for {self.num_vars} variables")
        self.rows.append(Row(tuple(coeffs), relation, rhs))
        self.row_names.append(name or f"c{len(self.rows)}")
        return len(self.rows) - 1

    def copy(self) -> "LpModel":
        return replace(self, objective=list(self.objective), rows=list(self.rows),
                       lower=list(self.lower), upper=list(self.upper),
                       integer=list(self.integer), names=list(self.names),
                       row_names=list(self.row_names))

    def relaxation(self) -> "LpModel":
        out = self.copy()
        out.integer = [False] * self.num_vars
        return out

    def validate(self):
        n = self.num_vars
        for lst, what in ((self.lower, "lower"), (self.upper, "upper"),
                          (self.integer, "integer"), (self.names, "names")):
            if len(lst) != n:
                raise ValueError(f"{what} has length {len(lst)}, expected {n}")
        for row in self.rows:
            if len(row.coeffs) != n:
                raise ValueError("row length differs from variable count")
        for j in range(n):
            lo, hi = self.lower[j], self.upper[j]
            if lo is not None and hi is not None and lo > hi:
                raise ValueError(f"variable {self.names[j]} has lower > upper")

    def objective_value(self, x: Sequence) -> Fraction:
        return sum((c * v for c, v in zip(self.objective, x) if c), Fraction(0))

    def is_feasible(self, x: Sequence, check_integrality: bool = True) -> bool:
        if len(x) != self.num_vars:
            return False
        for j, v in enumerate(x):
            v = Fraction(v)
            if self.lower[j] is not None and v < self.lower[j]:
                return False
            if self.upper[j] is not None and v > self.upper[j]:
                return False
            if check_integrality and self.integer[j] and v.denominator != 1:
                return False
        return all(row.satisfied(x) for row in self.rows)

    def signal_of(self, x: Sequence) -> tuple:
        if self.signal is None:
            return tuple(x)
        return tuple(Fraction(x[p]) - (Fraction(x[q]) if q is not None else 0)
                     for p, q in self.signal)


# --------------------------------------------------------------------------
# LP text format
# --------------------------------------------------------------------------

def _term(c: Fraction, name: str, first: bool) -> str:
    if c < 0:
        sign = "-" if first else "- "
    else:
        sign = "" if first else "+ "
    return f"{sign}{format_rational(abs(c))} {name}"


def _expr(coeffs, names) -> str:
    parts = []
    for c, name in zip(coeffs, names):
        if c:
            parts.append(_term(c, name, not parts))
    return " ".join(parts) if parts else "0"


def dump_lp(model: LpModel) -> str:
    """LP-style text with exact rationals; :func:`parse_lp` reads it back."""
    names = model.names
    out = ["minimize" if model.sense == "min" else "maximize",
           f"  obj: {_expr(model.objective, names)}", "subject to"]
    rel_text = {"<=": "<=", ">=": ">=", "==": "="}
    for name, row in zip(model.row_names, model.rows):
        out.append(f"  {name}: {_expr(row.coeffs, names)} {rel_text[row.relation]} "
                   f"{format_rational(row.rhs)}")
    out.append("bounds")
    for j, name in enumerate(names):
        lo, hi = model.lower[j], model.upper[j]
        if lo is None and hi is None:
            out.append(f"  {name} free")
        elif hi is None:
            out.append(f"  {name} >= {format_rational(lo)}")
        elif lo is None:
            out.append(f"  -inf <= {name} <= {format_rational(hi)}")
        else:
            out.append(f"  {format_rational(lo)} <= {name} <= {format_rational(hi)}")
    ints = [name for name, flag in zip(names, model.integer) if flag]
    if ints:
        out.append("general")
        out.append("  " + " ".join(ints))
    if model.signal is not None:
        parts = []
        for p, q in model.signal:
            parts.append(names[p] if q is None else f"{names[p]}-{names[q]}")
        out.append("signal")
        out.append("  " + " ".join(parts))
    out.append("end")
    return "\n".join(out) + "\n"


_TERM = re.compile(r"([+-])?\s*([0-9]+(?:/[0-9]+)?)\s+([A-Za-z_][\w\[\].]*)")


def _parse_expr(text: str) -> list:
    text = text.strip()
    if text == "0":
        return []
    pos, out = 0, []
    while pos < len(text):
        mt = _TERM.match(text, pos)
        if not mt:
            raise ValueError(f"cannot parse linear expression near {text[pos:]!r}")
        sign = -1 if mt.group(1) == "-" else 1
        out.append((sign * parse_rational(mt.group(2)), mt.group(3)))
        pos = mt.end()
        while pos < len(text) and text[pos] == " ":
            pos += 1
    return out


def parse_lp(text: str) -> LpModel:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("\\")]
    section = None
    sense, obj_terms, cons, bounds, ints, signal = "min", [], [], {}, [], None
    for ln in lines:
        low = ln.lower()
        if low in ("minimize", "maximize"):
            sense = "min" if low == "minimize" else "max"
            section = "obj"
            continue
        if low in ("subject to", "bounds", "general", "signal", "end"):
            section = low
            continue
        if section == "obj":
            obj_terms = _parse_expr(ln.split(":", 1)[1])
        elif section == "subject to":
            name, body = ln.split(":", 1)
            mt = re.match(r"(.*?)\s*(<=|>=|=)\s*(-?[0-9]+(?:/[0-9]+)?)\s*$", body)
            if not mt:
                raise ValueError(f"cannot parse constraint {ln!r}")
            rel = {"<=": "<=", ">=": ">=", "=": "=="}[mt.group(2)]
            cons.append((name.strip(), _parse_expr(mt.group(1)), rel,
                         parse_rational(mt.group(3))))
        elif section == "bounds":
            toks = ln.split()
            if len(toks) == 2 and toks[1] == "free":
                bounds[toks[0]] = (None, None)
            elif len(toks) == 3 and toks[1] == ">=":
                bounds[toks[0]] = (parse_rational(toks[2]), None)
            elif len(toks) == 5 and toks[1] == "<=" and toks[3] == "<=":
                lo = None if toks[0] == "-inf" else parse_rational(toks[0])
                bounds[toks[2]] = (lo, parse_rational(toks[4]))
            else:
                raise ValueError(f"cannot parse bound {ln!r}")
        elif section == "general":
            ints.extend(ln.split())
        elif section == "signal":
            signal = ln.split()
    names = list(bounds)
    for _, name in obj_terms:
        if name not in bounds:
            names.append(name)
    index = {name: j for j, name in enumerate(names)}
    model = LpModel(sense=sense)
    for name in names:
        lo, hi = bounds.get(name, (Fraction(0), None))
        model.add_var(name, lo, hi, integer=name in ints)
    for c, name in obj_terms:
        model.objective[index[name]] += c
    for name, terms, rel, rhs in cons:
        coeffs = {}
        for c, var in terms:
            coeffs[index[var]] = coeffs.get(index[var], 0) + c
        model.add_row(coeffs, rel, rhs, name=name)
    if signal is not None:
        pairs = []
        for tok in signal:
            p, _, q = tok.partition("-")
            pairs.append((index[p], index[q] if q else None))
        model.signal = tuple(pairs)
    return model
