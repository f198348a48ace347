"""Exact bounded-variable simplex on a fraction-free integer tableau.

The constraint rows are scaled to integers and kept as ``T = d * B^-1 A``
with ``d = det(B)``; a pivot on ``(r, c)`` with ``p = T[r][c]`` updates every
other row as ``(T_i * p - T_ic * T_r) // d`` (exact integer division) and
sets ``d = p``.  Reduced-cost rows follow the same rule.  Variable values
are exact fractions updated along each step.

Variables keep their own bounds (either side may be infinite); nonbasic
variables sit at a finite bound, or at zero when free.  A primal simplex
(Dantzig pricing with a Bland fallback on degenerate stalls) solves from
scratch; a dual simplex re-optimises after bound changes, which is what
branch-and-bound needs.
"""

from __future__ import annotations

import math
from fractions import Fraction

from ..core import SolveResult, Status
from .model import LpModel

# consecutive degenerate pivots before switching to Bland's rule
_STALL_LIMIT = 50


class Tableau:
    """Standard form ``A x + slacks + artificials = b`` with per-column bounds."""

    def __init__(self, model: LpModel):
        model.validate()
        n, rows = model.num_vars, model.rows
        self.n_user = n
        sign = 1 if model.sense == "min" else -1
        self.sense_sign = sign

        # columns: user vars, then one slack per inequality, then artificials
        lo = list(model.lower)
        hi = list(model.upper)
        slack_of = []
        for row in rows:
            if row.relation == "==":
                slack_of.append(None)
            else:
                slack_of.append(len(lo))
                lo.append(Fraction(0))
                hi.append(None)
        x = [_rest_value(lo[j], hi[j]) for j in range(len(lo))]

        int_rows, rhs = [], []
        for i, row in enumerate(rows):
            k = 1
            for v in row.coeffs:
                k = math.lcm(k, v.denominator)
            coeffs = [int(v * k) for v in row.coeffs]
            coeffs += [0] * (len(lo) - n)
            if slack_of[i] is not None:
                coeffs[slack_of[i]] = 1 if row.relation == "<=" else -1
            int_rows.append(coeffs)
            rhs.append(row.rhs * k)

        basis, artificial = [], []
        for i, coeffs in enumerate(int_rows):
            resid = rhs[i] - sum(c * x[j] for j, c in enumerate(coeffs) if c)
            s = slack_of[i]
            if s is not None and coeffs[s] * resid >= 0:
                if coeffs[s] < 0:
                    int_rows[i] = [-c for c in coeffs]
                x[s] = abs(resid)
                basis.append(s)
                continue
            if resid < 0:
                int_rows[i] = [-c for c in coeffs]
            j = len(lo)
            lo.append(Fraction(0))
            hi.append(None)
            x.append(abs(resid))
            artificial.append((i, j))
            basis.append(j)
        total = len(lo)
        for r in int_rows:
            r.extend([0] * (total - len(r)))
        for i, j in artificial:
            int_rows[i][j] = 1

        self.T = int_rows
        self.d = 1
        self.lo, self.hi, self.x = lo, hi, x
        self.basis = basis
        self.row_of = [-1] * total
        for i, j in enumerate(basis):
            self.row_of[j] = i
        self.is_artificial = [False] * total
        for _, j in artificial:
            self.is_artificial[j] = True

        cost_scale = 1
        for c in model.objective:
            cost_scale = math.lcm(cost_scale, Fraction(c).denominator)
        self.cost = [Fraction(c) * sign for c in model.objective] + [Fraction(0)] * (total - n)
        self.R2 = [int(c * cost_scale) for c in self.cost]
        # phase-one costs: 1 on artificials, reduced against the initial basis
        if artificial:
            R1 = [0] * total
            for i, _ in artificial:
                for j, v in enumerate(self.T[i]):
                    if v:
                        R1[j] -= v
            for _, j in artificial:
                R1[j] = 0
            self.R1 = R1
        else:
            self.R1 = None
        self.iterations = 0
        self.phase_one_done = not artificial

    # ------------------------------------------------------------------
    def copy(self) -> "Tableau":
        new = object.__new__(Tableau)
        new.__dict__.update(self.__dict__)
        new.T = [row[:] for row in self.T]
        new.lo, new.hi, new.x = self.lo[:], self.hi[:], self.x[:]
        new.basis, new.row_of = self.basis[:], self.row_of[:]
        new.R2 = self.R2[:]
        new.R1 = None if self.R1 is None else self.R1[:]
        return new

    @property
    def num_rows(self) -> int:
        return len(self.T)

    def user_values(self) -> tuple:
        return tuple(self.x[: self.n_user])

    def objective(self) -> Fraction:
        """Objective in the model's own sense."""
        val = sum((c * v for c, v in zip(self.cost, self.x) if c), Fraction(0))
        return val * self.sense_sign

    # ------------------------------------------------------------------
    def _pivot(self, r: int, c: int):
        T, d = self.T, self.d
        Tr = T[r]
        p = Tr[c]
        for i, Ti in enumerate(T):
            if i == r:
                continue
            f = Ti[c]
            if f:
                T[i] = [(a * p - f * b) // d for a, b in zip(Ti, Tr)]
            elif p != d:
                T[i] = [(a * p) // d for a in Ti]
        for name in ("R1", "R2"):
            R = getattr(self, name)
            if R is None:
                continue
            f = R[c]
            if f:
                setattr(self, name, [(a * p - f * b) // d for a, b in zip(R, Tr)])
            elif p != d:
                setattr(self, name, [(a * p) // d for a in R])
        old = self.basis[r]
        self.row_of[old] = -1
        self.row_of[c] = r
        self.basis[r] = c
        self.d = p
        self.iterations += 1

    def _move(self, c: int, delta: Fraction):
        """Change nonbasic ``x[c]`` by ``delta``, adjusting the basic values."""
        if not delta:
            return
        d, x, basis = self.d, self.x, self.basis
        for i, Ti in enumerate(self.T):
            a = Ti[c]
            if a:
                x[basis[i]] -= delta * a / d
        x[c] += delta

    def _status(self, j: int) -> str:
        lo, hi, v = self.lo[j], self.hi[j], self.x[j]
        if lo is not None and hi is not None and lo == hi:
            return "fixed"
        if lo is not None and v == lo:
            return "lower"
        if hi is not None and v == hi:
            return "upper"
        return "free"

    # ------------------------------------------------------------------
    def _entering(self, R: list, bland: bool):
        dsign = 1 if self.d > 0 else -1
        best, best_key = None, None
        for j, rj in enumerate(R):
            if not rj or self.row_of[j] >= 0:
                continue
            s = rj * dsign
            st = self._status(j)
            if st == "fixed":
                continue
            if st == "lower" and s < 0:
                direction = 1
            elif st == "upper" and s > 0:
                direction = -1
            elif st == "free":
                direction = -1 if s > 0 else 1
            else:
                continue
            if bland:
                return j, direction
            key = abs(rj)
            if best_key is None or key > best_key:
                best, best_key = (j, direction), key
        return best

    def _ratio(self, c: int, direction: int):
        """Returns (theta, leaving row or None for a bound flip); theta None = unbounded."""
        d = self.d
        theta, leave, leave_var = None, None, None
        lo, hi, x = self.lo, self.hi, self.x
        if lo[c] is not None and hi[c] is not None:
            theta = hi[c] - lo[c]
        for i, Ti in enumerate(self.T):
            a = Ti[c]
            if not a:
                continue
            rate = Fraction(-direction * a, d)
            b = self.basis[i]
            if rate < 0:
                if lo[b] is None:
                    continue
                t = (x[b] - lo[b]) / -rate
            else:
                if hi[b] is None:
                    continue
                t = (hi[b] - x[b]) / rate
            if theta is None or t < theta or (t == theta and leave is not None and b < leave_var):
                theta, leave, leave_var = t, i, b
        return theta, leave

    def _primal(self, phase: int, max_iter: int | None = None) -> Status:
        stall, bland = 0, False
        count = 0
        while True:
            R = self.R1 if phase == 1 else self.R2
            pick = self._entering(R, bland)
            if pick is None:
                return Status.OPTIMAL
            c, direction = pick
            theta, leave = self._ratio(c, direction)
            if theta is None:
                return Status.UNBOUNDED
            self._move(c, direction * theta)
            if leave is not None:
                b = self.basis[leave]
                self._pivot(leave, c)
                if self.is_artificial[b] and phase == 1:
                    self.hi[b] = Fraction(0)
                self._snap(b)
            if theta == 0:
                stall += 1
                bland = bland or stall >= _STALL_LIMIT
            else:
                stall, bland = 0, False
            count += 1
            if max_iter is not None and count >= max_iter:
                return Status.LIMIT

    def _snap(self, j: int):
        """Put a variable that just left the basis exactly on its bound."""
        lo, hi, v = self.lo[j], self.hi[j], self.x[j]
        if lo is not None and hi is not None:
            self.x[j] = lo if abs(v - lo) <= abs(v - hi) else hi
        elif lo is not None:
            self.x[j] = lo
        elif hi is not None:
            self.x[j] = hi

    def _phase_one(self) -> Status:
        if self.phase_one_done:
            return Status.OPTIMAL
        self._primal(1)
        arts = [j for j, a in enumerate(self.is_artificial) if a]
        if any(self.x[j] != 0 for j in arts):
            return Status.INFEASIBLE
        for j in arts:
            r = self.row_of[j]
            if r < 0:
                continue
            Tr = self.T[r]
            c = next((k for k, v in enumerate(Tr)
                      if v and self.row_of[k] < 0 and not self.is_artificial[k]), None)
            if c is not None:
                self._pivot(r, c)
        for j in arts:
            self.lo[j] = self.hi[j] = Fraction(0)
            self.x[j] = Fraction(0)
        self.R1 = None
        self.phase_one_done = True
        return Status.OPTIMAL

    def solve(self) -> Status:
        status = self._phase_one()
        if status is not Status.OPTIMAL:
            return status
        return self._primal(2)

    # ------------------------------------------------------------------
    def set_bounds(self, j: int, lower, upper):
        """Change the bounds of user column ``j``; call :meth:`reoptimize` after."""
        lower = None if lower is None else Fraction(lower)
        upper = None if upper is None else Fraction(upper)
        self.lo[j], self.hi[j] = lower, upper
        if self.row_of[j] >= 0:
            return
        v = self.x[j]
        if lower is not None and v < lower:
            self._move(j, lower - v)
        elif upper is not None and v > upper:
            self._move(j, upper - v)
        elif self._status(j) == "free" and (lower is not None or upper is not None):
            self._move(j, (lower if lower is not None else upper) - v)

    def _dual(self, max_iter: int) -> Status:
        lo, hi, x = self.lo, self.hi, self.x
        stall, bland = 0, False
        for count in range(max_iter):
            worst, r, target = Fraction(0), None, None
            for i, b in enumerate(self.basis):
                v = x[b]
                if lo[b] is not None and v < lo[b]:
                    gap = lo[b] - v
                    bound = lo[b]
                elif hi[b] is not None and v > hi[b]:
                    gap = v - hi[b]
                    bound = hi[b]
                else:
                    continue
                if bland:
                    # smallest infeasible basic variable
                    if r is None or b < self.basis[r]:
                        r, target = i, bound
                elif gap > worst:
                    worst, r, target = gap, i, bound
            if r is None:
                return Status.OPTIMAL
            dsign = 1 if self.d > 0 else -1
            b = self.basis[r]
            need_up = x[b] < target
            Tr, R = self.T[r], self.R2
            best, best_ratio = None, None
            for j, a in enumerate(Tr):
                if not a or self.row_of[j] >= 0:
                    continue
                st = self._status(j)
                if st == "fixed":
                    continue
                # x_b moves by -alpha * delta_j, alpha = a / d
                s = a * dsign
                if need_up:
                    ok = (st == "lower" and s < 0) or (st == "upper" and s > 0) or st == "free"
                else:
                    ok = (st == "lower" and s > 0) or (st == "upper" and s < 0) or st == "free"
                if not ok:
                    continue
                ratio = Fraction(abs(R[j]), abs(a))
                if best_ratio is None or ratio < best_ratio or (
                        not bland and ratio == best_ratio and abs(a) > abs(Tr[best])):
                    best, best_ratio = j, ratio
            if best is None:
                return Status.INFEASIBLE
            if best_ratio == 0:
                stall += 1
                bland = bland or stall >= _STALL_LIMIT
            else:
                stall, bland = 0, False
            delta = (x[b] - target) * self.d / Tr[best]
            self._move(best, delta)
            self._pivot(r, best)
            x[b] = target
        return Status.LIMIT

    def reoptimize(self) -> Status:
        """Restore optimality after bound changes (dual simplex, then a primal pass)."""
        if not self.phase_one_done:
            return self.solve()
        status = self._dual(max_iter=50 * (len(self.T) + len(self.x)))
        if status is Status.LIMIT:
            return Status.LIMIT
        if status is Status.INFEASIBLE:
            return status
        return self._primal(2)


def _rest_value(lo, hi) -> Fraction:
    if lo is not None:
        return Fraction(lo)
    if hi is not None:
        return Fraction(hi)
    return Fraction(0)


def solve_lp(model: LpModel) -> SolveResult:
    """Solve the continuous relaxation of ``model`` exactly."""
    relaxed = model.relaxation() if any(model.integer) else model
    tab = Tableau(relaxed)
    status = tab.solve()
    if status is not Status.OPTIMAL:
        return SolveResult(status, lp_iterations=tab.iterations)
    return SolveResult(Status.OPTIMAL, value=tab.objective(), solution=tab.user_values(),
                       lp_iterations=tab.iterations)
