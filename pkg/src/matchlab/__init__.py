"""Exact algebra and simulation for stochastic matching models on general graphs."""

__version__ = "0.1.0"

from .conservation import (
    as_rates, is_stabilizable, maximin_solution, particular_solution_pseudoinverse,
    solve_bijective, solve_linear,
)
from .errors import GuardError, InfeasibleError, MatchlabError, ValidationError
from .graph import build_graph, classify
from .kernel import KernelBasis, kernel_basis
from .policies import parse_policy
from .polytope import build_polytope, classify_inequalities, enumerate_vertices
from .reference import policy_decide
from .simulator import simulate

__all__ = [
    "GuardError", "InfeasibleError", "KernelBasis", "MatchlabError", "ValidationError",
    "as_rates", "build_graph", "build_polytope", "classify", "classify_inequalities",
    "enumerate_vertices", "is_stabilizable", "kernel_basis", "maximin_solution",
    "parse_policy", "particular_solution_pseudoinverse", "policy_decide", "simulate", "solve_bijective",
    "solve_linear",
]
