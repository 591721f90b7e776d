"""
Solutions of the conservation equation ``A mu = lambda``.

Closed forms on bijective graphs, the pseudoinverse and maximin particular
solutions on surjective graphs, and stabilizability tests.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import _rational as qr
from .errors import InfeasibleError, ValidationError
from .graph import (
    classify,
    connected_components,
    enumerate_independent_sets,
    find_odd_cycle,
    incidence_apply,
    is_connected,
    node_distances,
)
from .lp import linprog_exact

#: certificates fall back to the LP report above this size
BRUTE_FORCE_CERTIFICATE_LIMIT = 12


def as_rates(g, rates):
    """
    Validate and convert arrival rates to a tuple of positive fractions.

    >>> from matchlab.generators import triangle
    >>> as_rates(triangle(), [1, "1/2", 0.25])
    (Fraction(1, 1), Fraction(1, 2), Fraction(1, 4))
    """
    if rates is None:
        raise ValidationError("arrival rates are required")
    lam = qr.to_fractions(rates)
    if len(lam) != g.n:
        raise ValidationError(f"got {len(lam)} rates for {g.n} nodes")
    bad = [i + 1 for i, v in enumerate(lam) if v <= 0]
    if bad:
        raise ValidationError(f"arrival rates must be positive (nodes {bad})")
    return lam


def normalize_rates(lam):
    """Explicitly rescale rates so they sum to one."""
    lam = qr.to_fractions(lam)
    total = sum(lam)
    return tuple(v / total for v in lam)


def is_conservative(g, lam, mu):
    return incidence_apply(g, list(mu)) == list(lam)


def _check(g, lam, mu):
    res = [a - b for a, b in zip(incidence_apply(g, list(mu)), lam)]
    if any(res):
        raise ArithmeticError(f"internal error: residual {res}")
    return tuple(mu)


def solve_bijective(g, rates):
    """
    Unique solution of the conservation equation on a bijective graph.

    On a tree edge k hanging off the cycle, ``mu_k`` is the alternating sum of
    rates over the tree side ``V_k``, signed by the parity of the distance to
    the edge. On a cycle edge, it is half the alternating sum over the whole
    component.

    Examples
    --------

    >>> from matchlab.generators import triangle, paw
    >>> solve_bijective(triangle(), [3, 4, 5])
    (Fraction(1, 1), Fraction(2, 1), Fraction(3, 1))
    >>> [str(x) for x in solve_bijective(paw(), [2, 2, 4, 1])]
    ['1/2', '3/2', '3/2', '1']
    """
    lam = as_rates(g, rates)
    cls = classify(g)
    if cls.kind != "bijective":
        raise ValidationError(
            f"graph is {cls.kind}, not bijective "
            f"(nullity_A={cls.nullity_A}, nullity_At={cls.nullity_At})"
        )
    mu = [None] * g.m
    for comp in cls.components:
        cycle = find_odd_cycle(g, comp.nodes)
        cyc_nodes = set(cycle)
        cyc_edges = {
            g.edge_index(cycle[t], cycle[(t + 1) % len(cycle)]) for t in range(len(cycle))
        }
        # orient the hanging trees away from the cycle
        dist = node_distances(g, cycle)
        children = {v: [] for v in comp.nodes}
        for v in comp.nodes:
            if v not in cyc_nodes:
                parent = min(u for u in g.neighbors[v] if dist[u] == dist[v] - 1)
                children[parent].append(v)
        for v in comp.nodes:
            if v in cyc_nodes:
                continue
            parent = min(u for u in g.neighbors[v] if dist[u] == dist[v] - 1)
            # V_k is the subtree below v; d_{i,k} is the depth below v
            total, stack = Fraction(0), [(v, 0)]
            while stack:
                u, d = stack.pop()
                total += lam[u] if d % 2 == 0 else -lam[u]
                stack.extend((c, d + 1) for c in children[u])
            mu[g.edge_index(v, parent)] = total
        for k in cyc_edges:
            i, j = g.edges[k]
            d = node_distances(g, [i, j])
            total = sum((lam[v] if d[v] % 2 == 0 else -lam[v]) for v in comp.nodes)
            mu[k] = total / 2
    return _check(g, lam, mu)


def solve_linear(g, rates):
    """
    Generic exact solve of ``A mu = lambda`` (one solution, or ``None``).
    """
    lam = qr.to_fractions(rates)
    sol = qr.solve(g.incidence_matrix(), lam)
    return None if sol is None else tuple(sol)


def _require_surjective(g, what):
    cls = classify(g)
    if not cls.surjective:
        raise ValidationError(f"{what} requires a surjective graph; this graph is {cls.kind}")
    return cls


def particular_solution_pseudoinverse(g, rates):
    """
    Minimum-norm solution ``A^T (A A^T)^{-1} lambda``.

    >>> from matchlab.generators import diamond
    >>> [str(x) for x in particular_solution_pseudoinverse(diamond(), [4, 5, 2, 1])]
    ['11/4', '5/4', '1', '5/4', '-1/4']
    """
    lam = as_rates(g, rates)
    _require_surjective(g, "the pseudoinverse solution")
    # A A^T is the signless Laplacian
    aat = [[Fraction(0)] * g.n for _ in range(g.n)]
    for i, j in g.edges:
        aat[i][i] += 1
        aat[j][j] += 1
        aat[i][j] += 1
        aat[j][i] += 1
    y = qr.solve(aat, lam)
    mu = [y[i] + y[j] for i, j in g.edges]
    return _check(g, lam, mu)


@dataclass(frozen=True)
class MaximinResult:
    """
    Optimal basic solution of ``max z s.t. A mu = lambda, mu_k >= z``.

    ``slack`` equals ``min(flow)``.
    """

    flow: tuple
    slack: Fraction
    optimal: bool = True


def maximin_solution(g, rates):
    """
    Conservative flow whose smallest coordinate is as large as possible.

    Solved per connected component with the exact simplex (Bland's rule),
    using ``mu = z 1 + s`` with ``s >= 0`` and ``z`` free.

    >>> from matchlab.generators import triangle
    >>> r = maximin_solution(triangle(), [3, 4, 5])
    >>> r.flow, r.slack
    ((Fraction(1, 1), Fraction(2, 1), Fraction(3, 1)), Fraction(1, 1))
    """
    lam = as_rates(g, rates)
    _require_surjective(g, "the maximin solution")
    mu = [None] * g.m
    for nodes in connected_components(g):
        edges = sorted({k for v in nodes for k in g.incident[v]})
        pos = {k: t for t, k in enumerate(edges)}
        z = len(edges)
        a_eq = []
        for v in nodes:
            row = [Fraction(0)] * (len(edges) + 1)
            for k in g.incident[v]:
                row[pos[k]] = Fraction(1)
            row[z] = Fraction(len(g.incident[v]))
            a_eq.append(row)
        c = [Fraction(0)] * len(edges) + [Fraction(-1)]
        res = linprog_exact(c, a_eq, [lam[v] for v in nodes], free=[z])
        if not res.optimal:
            raise ArithmeticError(f"internal error: maximin LP is {res.status}")
        zval = res.x[z]
        for k in edges:
            mu[k] = zval + res.x[pos[k]]
    flow = _check(g, lam, mu)
    return MaximinResult(flow, min(flow))


@dataclass(frozen=True)
class StabilizabilityReport:
    """
    Verdict of :func:`is_stabilizable`.

    ``certificate_kind`` is ``None`` when stabilizable, else one of
    ``"bipartite-component"`` (``certificate`` = node tuple),
    ``"independent-set"`` (``certificate`` = node tuple violating the strict
    inequality) or ``"maximin"`` (``certificate`` = the zero- or
    negative-slack maximin flow). Node tuples are 0-based.
    """

    stabilizable: bool
    witness: tuple = None
    slack: Fraction = None
    certificate_kind: str = None
    certificate: tuple = None


def _violated_independent_set(g, lam):
    for s in enumerate_independent_sets(g):
        if sum(lam[v] for v in s.nodes) >= sum(lam[v] for v in s.neighborhood):
            return s
    return None


def is_stabilizable(g, rates):
    """
    Exact stabilizability test: surjective graph and positive maximin slack.

    >>> from matchlab.generators import triangle, square
    >>> is_stabilizable(triangle(), [5, 1, 1]).certificate
    (0,)
    >>> is_stabilizable(square(), [1, 1, 1, 1]).certificate_kind
    'bipartite-component'
    """
    lam = as_rates(g, rates)
    cls = classify(g)
    if not cls.surjective:
        comp = cls.bipartite_components[0]
        return StabilizabilityReport(False, certificate_kind="bipartite-component",
                                     certificate=comp.nodes)
    mm = maximin_solution(g, lam)
    if mm.slack > 0:
        return StabilizabilityReport(True, witness=mm.flow, slack=mm.slack)
    if g.n <= BRUTE_FORCE_CERTIFICATE_LIMIT:
        s = _violated_independent_set(g, lam)
        if s is not None:
            return StabilizabilityReport(False, slack=mm.slack,
                                         certificate_kind="independent-set",
                                         certificate=s.nodes)
    return StabilizabilityReport(False, slack=mm.slack, certificate_kind="maximin",
                                 certificate=mm.flow)


def is_stabilizable_bruteforce(g, rates, node_limit=20):
    """
    Independent-set condition: ``sum_I lambda < sum_{V(I)} lambda`` for all I.

    >>> from matchlab.generators import diamond
    >>> is_stabilizable_bruteforce(diamond(), [4, 5, 2, 1])
    True
    """
    lam = as_rates(g, rates)
    _require_surjective(g, "the independent-set test")
    return all(
        sum(lam[v] for v in s.nodes) < sum(lam[v] for v in s.neighborhood)
        for s in enumerate_independent_sets(g, node_limit)
    )


def lyapunov_sufficient_condition(g, rates, node_limit=20):
    """
    Sufficient condition for every greedy policy to be stable:
    ``sum_{V(I)} lambda > (1/2) sum lambda`` for every independent set I.

    >>> from matchlab.generators import diamond
    >>> lyapunov_sufficient_condition(diamond(), [1, 2, 2, 1])
    True
    """
    lam = as_rates(g, rates)
    if not is_connected(g):
        raise ValidationError("the sufficient condition is stated for connected graphs")
    half = sum(lam) / 2
    return all(
        sum(lam[v] for v in s.neighborhood) > half
        for s in enumerate_independent_sets(g, node_limit)
    )


def degree_proportional_rates(g, beta=1):
    """
    Rates ``lambda = A (beta, ..., beta)``, stabilizable with witness beta.

    >>> from matchlab.generators import diamond
    >>> degree_proportional_rates(diamond())
    (Fraction(2, 1), Fraction(3, 1), Fraction(3, 1), Fraction(2, 1))
    """
    beta = qr.to_fraction(beta)
    if beta <= 0:
        raise ValidationError("beta must be positive")
    _require_surjective(g, "degree-proportional rates")
    return tuple(beta * d for d in g.degrees)


def require_stabilizable(g, rates):
    rep = is_stabilizable(g, rates)
    if not rep.stabilizable:
        raise InfeasibleError(f"problem is not stabilizable ({rep.certificate_kind} certificate)")
    return rep


__all__ = [
    "MaximinResult",
    "StabilizabilityReport",
    "as_rates",
    "degree_proportional_rates",
    "is_stabilizable",
    "is_stabilizable_bruteforce",
    "lyapunov_sufficient_condition",
    "maximin_solution",
    "normalize_rates",
    "particular_solution_pseudoinverse",
    "require_stabilizable",
    "solve_bijective",
    "solve_linear",
]
