"""
The polytope of non-negative conservative flows in kernel coordinates.

``alpha`` is feasible iff ``mu0_k + sum_j alpha_j b_{j,k} >= 0`` for every
edge k. Vertices are found by intersecting every d-subset of these
hyperplanes; tightness and redundancy of each inequality are decided by
exact linear programs in edge coordinates.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from . import _rational as qr
from .conservation import as_rates, require_stabilizable
from .errors import GuardError, ValidationError, guard_override
from .graph import classify
from .kernel import KernelBasis, kernel_basis
from .lp import linprog_exact

VERTEX_GUARD = 10**6


@dataclass(frozen=True)
class RatePolytope:
    """
    ``inequalities[k] = (mu0_k, (b_{1,k}, ..., b_{d,k}))`` encodes
    ``mu_k(alpha) >= 0``.
    """

    graph: object
    rates: tuple
    basis: KernelBasis
    inequalities: tuple

    @property
    def d(self):
        return self.basis.d

    @property
    def m(self):
        return self.graph.m

    def edge_value(self, k, alpha):
        c, row = self.inequalities[k]
        return c + sum((a * b for a, b in zip(alpha, row)), Fraction(0))

    def contains(self, alpha, strict=False):
        vals = [self.edge_value(k, alpha) for k in range(self.m)]
        return all(v > 0 for v in vals) if strict else all(v >= 0 for v in vals)


@dataclass(frozen=True)
class PolytopeVertex:
    """A vertex with its support ``{k : mu_k > 0}`` (0-based edge indices)."""

    alpha: tuple
    mu: tuple
    support: frozenset
    tight_set: frozenset
    kind: str

    @property
    def achievable(self):
        return self.kind == "bijective"


@dataclass(frozen=True)
class InequalityStatus:
    tight: tuple
    redundant: tuple
    essential: bool
    simple: bool

    @property
    def irredundant(self):
        return tuple(not r for r in self.redundant)


def build_polytope(g, rates, basis=None):
    """
    Rate polytope of a stabilizable problem.

    The default basis is the structural one with the maximin origin; pass a
    :class:`~matchlab.kernel.KernelBasis` to work in other coordinates.

    >>> from matchlab.generators import fish
    >>> p = build_polytope(fish(), [4, 4, 3, 2, 3, 2])
    >>> p.d
    1
    """
    lam = as_rates(g, rates)
    require_stabilizable(g, lam)
    if basis is None:
        basis = kernel_basis(g, rates=lam)
    elif tuple(basis.rates) != lam:
        raise ValidationError("basis origin is not a solution for these rates")
    ineq = tuple(
        (basis.origin[k], tuple(Fraction(b[k]) for b in basis.vectors)) for k in range(g.m)
    )
    return RatePolytope(g, lam, basis, ineq)


def _make_vertex(p, alpha):
    mu = p.basis.to_edge_coords(alpha)
    support = frozenset(k for k, v in enumerate(mu) if v > 0)
    sub = classify(p.graph.subgraph(support))
    if not sub.injective:
        raise ArithmeticError("internal error: vertex support graph is not injective")
    kind = "bijective" if len(support) == p.graph.n else "injective-only"
    return PolytopeVertex(tuple(alpha), mu, support, frozenset(range(p.m)) - support, kind)


def enumerate_vertices(p):
    """
    All vertices, sorted by kernel coordinates.

    Every d-subset of hyperplanes is solved exactly; feasible intersections
    are kept and deduplicated. Refuses when ``C(m, d)`` exceeds
    :data:`VERTEX_GUARD` unless ``MATCHLAB_GUARD_OVERRIDE=1``.
    """
    d, m = p.d, p.m
    if d == 0:
        return [_make_vertex(p, ())] if p.contains(()) else []
    if comb(m, d) > VERTEX_GUARD and not guard_override():
        raise GuardError(
            f"C({m},{d}) = {comb(m, d)} hyperplane subsets exceeds {VERTEX_GUARD}; "
            "set MATCHLAB_GUARD_OVERRIDE=1 to proceed"
        )
    found = set()
    for subset in combinations(range(m), d):
        mat = [list(p.inequalities[k][1]) for k in subset]
        rhs = [-p.inequalities[k][0] for k in subset]
        if qr.rank(mat) < d:
            continue
        alpha = tuple(qr.solve(mat, rhs))
        if alpha not in found and p.contains(alpha):
            found.add(alpha)
    return [_make_vertex(p, a) for a in sorted(found)]


def _min_edge(g, lam, k, drop=False):
    a_eq = g.incidence_matrix()
    c = [0] * g.m
    c[k] = 1
    return linprog_exact(c, a_eq, lam, free=[k] if drop else [])


def _affine_dim(points):
    if not points:
        return -1
    base = points[0]
    return qr.rank([[x - y for x, y in zip(q, base)] for q in points[1:]]) if len(points) > 1 else 0


def classify_inequalities(p, vertices=None):
    """
    Tight/redundant flags per edge plus the essential and simple predicates.

    An inequality is tight when ``min mu_k = 0`` over the polytope and
    irredundant when dropping it admits a feasible point with ``mu_k < 0``.
    The polytope is simple when every vertex lies on exactly ``d`` distinct
    facets; a facet is a face ``{mu_k = 0}`` of dimension ``d - 1``.
    """
    g, lam = p.graph, p.rates
    if vertices is None:
        vertices = enumerate_vertices(p)
    tight, redundant = [], []
    for k in range(p.m):
        res = _min_edge(g, lam, k)
        is_tight = res.value == 0
        tight.append(is_tight)
        if not is_tight:
            redundant.append(True)
            continue
        relaxed = _min_edge(g, lam, k, drop=True)
        redundant.append(not (relaxed.status == "unbounded" or relaxed.value < 0))
    essential = all(r is False for t, r in zip(tight, redundant) if t)
    facets = set()
    for k in range(p.m):
        on = frozenset(t for t, v in enumerate(vertices) if v.mu[k] == 0)
        if on and _affine_dim([vertices[t].alpha for t in sorted(on)]) == p.d - 1:
            facets.add(on)
    simple = all(sum(1 for f in facets if t in f) == p.d for t in range(len(vertices)))
    return InequalityStatus(tuple(tight), tuple(redundant), essential, simple)


@dataclass(frozen=True)
class RewardOptimum:
    value: Fraction
    vertex: PolytopeVertex
    ties: int


def maximize_reward(p, w, vertices=None):
    """
    Maximize ``w . mu`` over the polytope; the optimum is reached at a
    vertex. ``ties`` counts the vertices attaining it.
    """
    w = qr.to_fractions(w)
    if len(w) != p.m:
        raise ValidationError(f"reward vector has length {len(w)}, expected {p.m}")
    if vertices is None:
        vertices = enumerate_vertices(p)
    values = [sum(a * b for a, b in zip(w, v.mu)) for v in vertices]
    best = max(values)
    first = values.index(best)
    return RewardOptimum(best, vertices[first], values.count(best))


@dataclass(frozen=True)
class AchievabilityReport:
    vertex_achievable: tuple
    fully_achievable: bool
    interior_achievable: bool = True
    interior_note: str = "conjecture: relies on semi-filtering convergence"


def achievability_report(p, vertices=None, status=None):
    if vertices is None:
        vertices = enumerate_vertices(p)
    if status is None:
        status = classify_inequalities(p, vertices)
    return AchievabilityReport(
        tuple(v.achievable for v in vertices), status.essential and status.simple
    )


def vertices_by_support(g, rates, max_edges=16):
    """
    Brute-force vertex oracle in edge coordinates.

    Tries every edge subset whose spanning subgraph is injective, solves the
    conservation equation on it and keeps solutions positive on exactly that
    subset. Exponential in m.
    """
    lam = as_rates(g, rates)
    if g.m > max_edges and not guard_override():
        raise GuardError(f"support enumeration refused: m={g.m} > {max_edges}")
    a = g.incidence_matrix()
    out = set()
    for size in range(g.m + 1):
        for sub in combinations(range(g.m), size):
            if not classify(g.subgraph(sub)).injective:
                continue
            cols = [[row[k] for k in sub] for row in a]
            sol = qr.solve(cols, lam) if sub else (None if any(lam) else [])
            if sol is None or any(v <= 0 for v in sol):
                continue
            mu = [Fraction(0)] * g.m
            for k, v in zip(sub, sol):
                mu[k] = v
            out.add(tuple(mu))
    return sorted(out)
