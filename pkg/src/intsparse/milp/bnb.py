"""Best-bound branch-and-bound over the exact simplex."""

from __future__ import annotations

import heapq
import itertools
import math
import time
from fractions import Fraction

from ..core import SolveResult, Status
from .model import LpModel, UnboundedIntegral
from .simplex import Tableau

# open nodes keep their solved tableau up to this many stored entries
_SNAPSHOT_BUDGET = 2_000_000


def _integral_objective(model: LpModel) -> bool:
    """True when every feasible integer point has an integral objective."""
    for c, is_int in zip(model.objective, model.integer):
        if c and (not is_int or Fraction(c).denominator != 1):
            return False
    return True


def _most_fractional(x, integer):
    best, best_gap = None, None
    for j, (v, is_int) in enumerate(zip(x, integer)):
        if not is_int or v.denominator == 1:
            continue
        frac = v - math.floor(v)
        gap = abs(frac - Fraction(1, 2))
        if best_gap is None or gap < best_gap:
            best, best_gap = j, gap
    return best


def solve_milp(model: LpModel, cutoff=None, time_limit: float | None = None,
               node_limit: int | None = None) -> SolveResult:
    """Exact MILP optimum by LP-based branch-and-bound.

    ``cutoff`` stops the search at the first incumbent at least as good as it
    (status FEASIBLE unless that incumbent is already proven optimal).
    ``time_limit`` (seconds) and ``node_limit`` end the search with status
    FEASIBLE when an incumbent exists and LIMIT otherwise.
    """
    model.validate()
    for j, is_int in enumerate(model.integer):
        if is_int and (model.lower[j] is None or model.upper[j] is None):
            raise UnboundedIntegral(
                f"integer variable {model.names[j]} needs finite bounds")
    start = time.perf_counter()
    sign = 1 if model.sense == "min" else -1
    integral_obj = _integral_objective(model)
    cut = None if cutoff is None else Fraction(cutoff) * sign

    def key_of(value):
        # internal minimisation bound; rounded up when objectives are integral
        v = value * sign
        return Fraction(math.ceil(v)) if integral_obj else v

    root = Tableau(model)
    status = root.solve()
    lp_iters = root.iterations
    if status is Status.INFEASIBLE:
        return SolveResult(Status.INFEASIBLE, nodes_explored=1, lp_iterations=lp_iters)
    if status is Status.UNBOUNDED:
        return SolveResult(Status.UNBOUNDED, nodes_explored=1, lp_iterations=lp_iters)

    integer = model.integer
    incumbent, inc_val = None, None
    seq = itertools.count()
    heap = []
    stored = 0
    nodes = 1
    tableau_size = max(1, root.num_rows * len(root.x))

    def consider(tab, depth, bounds):
        """Record an integral solution or queue the node.  Returns True to stop."""
        nonlocal incumbent, inc_val, stored
        x = tab.user_values()
        bound = key_of(tab.objective())
        if inc_val is not None and bound >= inc_val:
            return False
        j = _most_fractional(x, integer)
        if j is None:
            incumbent, inc_val = x, tab.objective() * sign
            return cut is not None and inc_val <= cut
        keep = tab if stored + tableau_size <= _SNAPSHOT_BUDGET else None
        if keep is not None:
            stored += tableau_size
        heapq.heappush(heap, (bound, -depth, next(seq), keep, bounds, j))
        return False

    def solve_child(parent, bounds):
        nonlocal lp_iters
        if parent is not None:
            tab = parent.copy()
            for j, (lo, hi) in bounds.items():
                if tab.lo[j] != lo or tab.hi[j] != hi:
                    tab.set_bounds(j, lo, hi)
            before = tab.iterations
            st = tab.reoptimize()
            lp_iters += tab.iterations - before
            if st is not Status.LIMIT:
                return st, tab
        sub = model.copy()
        for j, (lo, hi) in bounds.items():
            sub.lower[j], sub.upper[j] = lo, hi
        tab = Tableau(sub)
        st = tab.solve()
        lp_iters += tab.iterations
        return st, tab

    stopped = consider(root, 0, {})
    pending = None  # bound of a node whose children were cut short
    limit_hit = False
    while heap and not stopped:
        if time_limit is not None and time.perf_counter() - start > time_limit:
            limit_hit = True
            break
        if node_limit is not None and nodes >= node_limit:
            limit_hit = True
            break
        bound, negdepth, _, tab, bounds, j = heapq.heappop(heap)
        if tab is not None:
            stored -= tableau_size
        if inc_val is not None and bound >= inc_val:
            continue
        if tab is None:
            st, tab = solve_child(None, bounds)
            if st is not Status.OPTIMAL:
                continue
        v = tab.x[j]
        lo_j = tab.lo[j]
        hi_j = tab.hi[j]
        for new_lo, new_hi in ((lo_j, Fraction(math.floor(v))), (Fraction(math.ceil(v)), hi_j)):
            child_bounds = dict(bounds)
            child_bounds[j] = (new_lo, new_hi)
            nodes += 1
            st, child = solve_child(tab, child_bounds)
            if st is not Status.OPTIMAL:
                continue
            if consider(child, -negdepth + 1, child_bounds):
                stopped, pending = True, bound
                break

    info = {"elapsed": time.perf_counter() - start}
    if incumbent is None:
        status = Status.LIMIT if limit_hit else Status.INFEASIBLE
        return SolveResult(status, nodes_explored=nodes, lp_iterations=lp_iters, info=info)
    open_bounds = [entry[0] for entry in heap]
    if pending is not None:
        open_bounds.append(pending)
    proven = not limit_hit and all(b >= inc_val for b in open_bounds)
    status = Status.OPTIMAL if proven else Status.FEASIBLE
    return SolveResult(status, value=inc_val * sign, solution=incumbent,
                       nodes_explored=nodes, lp_iterations=lp_iters, info=info)
