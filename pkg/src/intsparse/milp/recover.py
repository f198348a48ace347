"""One-call solving of recovery instances."""

from __future__ import annotations

from ..core import RecoveryInstance, SolveResult, Status
from .bnb import solve_milp
from .builders import build_model, unique_optimum


def solve_instance(instance: RecoveryInstance, bounds="auto", uniqueness: bool = False,
                   time_limit: float | None = None) -> SolveResult:
    """Solve P0/P1 for ``instance`` and report the optimum as a signal vector.

    ``bounds`` only matters for unbounded X (see :func:`build_p0`).  With
    ``uniqueness`` the result also says whether the optimal signal is the
    only one.  The returned solution is re-checked against Ax = b and X.
    """
    model = build_model(instance, bounds)
    res = solve_milp(model, time_limit=time_limit)
    info = dict(res.info, variables=model.num_vars, rows=len(model.rows))
    if res.status not in (Status.OPTIMAL, Status.FEASIBLE):
        return SolveResult(res.status, nodes_explored=res.nodes_explored,
                           lp_iterations=res.lp_iterations, info=info)
    x = model.signal_of(res.solution)
    if not instance.is_feasible(x):
        raise AssertionError(f"solver returned an infeasible signal {x}")
    value = instance.objective_value(x)
    if res.status is Status.OPTIMAL and value != res.value:
        raise AssertionError(f"objective mismatch: model {res.value}, signal {value}")
    unique = None
    if uniqueness and res.status is Status.OPTIMAL:
        unique = unique_optimum(model, res)
    return SolveResult(res.status, value=value, solution=x, unique=unique,
                       nodes_explored=res.nodes_explored, lp_iterations=res.lp_iterations,
                       info=info)
