"""Exact LP/MILP engine and the model builders used by the recovery checks."""

from .bnb import solve_milp
from .model import LpModel, Row, UnboundedIntegral, dump_lp, parse_lp
from .recover import solve_instance
from .simplex import Tableau, solve_lp

__all__ = ["LpModel", "Row", "Tableau", "UnboundedIntegral", "dump_lp", "parse_lp",
           "solve_instance", "solve_lp", "solve_milp"]
