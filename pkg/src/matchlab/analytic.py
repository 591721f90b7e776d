"""
Closed-form stationary quantities of greedy policies on complete graphs and
on the diamond, plus the diamond's conventional kernel coordinates.
"""

from dataclasses import dataclass
from fractions import Fraction

from .conservation import as_rates
from .errors import InfeasibleError, ValidationError
from .generators import complete_graph, diamond, fish
from .graph import incidence_apply
from .kernel import KernelBasis


@dataclass(frozen=True)
class CompleteGreedy:
    """``rates`` in canonical edge order; ``p[i]`` = P(only class i waits)."""

    rates: tuple
    p: tuple
    p_empty: Fraction


def analytic_greedy_complete(n, rates):
    """
    Matching rates shared by every greedy policy on K_n.

    >>> r = analytic_greedy_complete(3, [3, 4, 5])
    >>> [str(x) for x in r.rates], r.p_empty
    (['1', '2', '3'], Fraction(1, 5))
    """
    g = complete_graph(n)
    lam = as_rates(g, rates)
    total = sum(lam)
    if any(2 * x >= total for x in lam):
        raise InfeasibleError("unstabilizable: some rate is at least half the total")
    weights = [x / (total - 2 * x) for x in lam]
    p0 = 1 / (1 + sum(weights))
    p = tuple(w * p0 for w in weights)
    mu = tuple(lam[i] * p[j] + lam[j] * p[i] for i, j in g.edges)
    if tuple(incidence_apply(g, list(mu))) != lam:
        raise ArithmeticError("internal error: greedy rates are not conservative")
    return CompleteGreedy(mu, p, p0)


@dataclass(frozen=True)
class DiamondGreedy:
    """
    Exact values for any greedy policy on the diamond.

    ``p14`` is the probability that items wait and all belong to classes 1
    or 4. ``p1_lower``, ``p4_lower`` are strict lower bounds and
    ``mu_lower`` holds lower bounds for edges 1-2, 1-3, 2-4, 3-4 given the
    true p_1, p_4 (here evaluated at their lower bounds).
    """

    beta: Fraction
    p_empty: Fraction
    p2: Fraction
    p3: Fraction
    p14: Fraction
    p1_lower: Fraction
    p4_lower: Fraction
    mu23: Fraction
    mu_lower: dict


def _diamond_rates(rates):
    lam = as_rates(diamond(), rates)
    l1, l2, l3, l4 = lam
    if not (l1 + l4 < l2 + l3 and l2 < l1 + l3 + l4 and l3 < l1 + l2 + l4):
        raise InfeasibleError("diamond rates are not stabilizable")
    return lam


def analytic_greedy_diamond(rates):
    """
    >>> r = analytic_greedy_diamond([Fraction(1, 4), Fraction(3, 4), Fraction(3, 4), Fraction(1, 4)])
    >>> r.beta, r.p2, r.p14
    (Fraction(1, 2), Fraction(1, 3), Fraction(1, 9))
    """
    l1, l2, l3, l4 = _diamond_rates(rates)
    w2 = l2 / (l1 + l3 + l4 - l2)
    w3 = l3 / (l1 + l2 + l4 - l3)
    w14 = (l1 + l4) / (l2 + l3 - l1 - l4)
    p0 = 1 / (1 + w2 + w3 + w14)
    p1 = l1 / (l2 + l3 + l4) * p0
    p4 = l4 / (l1 + l2 + l3) * p0
    p2, p3 = w2 * p0, w3 * p0
    bounds = {
        "1-2": l1 * p2 + l2 * p1,
        "1-3": l1 * p3 + l3 * p1,
        "2-4": l2 * p4 + l4 * p2,
        "3-4": l3 * p4 + l4 * p3,
    }
    beta = (l2 + l3 - l1 - l4) / 2
    return DiamondGreedy(beta, p0, p2, p3, w14 * p0, p1, p4, beta, bounds)


def diamond_rates(beta, l1=Fraction(1, 4), l2bar=Fraction(1, 4), l3bar=Fraction(1, 4),
                  l4=Fraction(1, 4)):
    """``(l1, l2bar + beta, l3bar + beta, l4)`` with ``l1 + l4 = l2bar + l3bar``."""
    l1, l2bar, l3bar, l4, beta = (Fraction(x) for x in (l1, l2bar, l3bar, l4, beta))
    if l1 + l4 != l2bar + l3bar:
        raise ValidationError("need l1 + l4 = l2bar + l3bar")
    if beta <= 0:
        raise ValidationError("beta must be positive")
    return (l1, l2bar + beta, l3bar + beta, l4)


def diamond_basis(rates):
    """
    Kernel coordinates in which ``alpha`` grows with edges 1-2 and 3-4:
    ``mu = (l1 l2bar/s + a, l1 l3bar/s - a, beta, l2bar l4/s - a, l3bar l4/s + a)``
    with ``s = l1 + l4``.

    >>> kb = diamond_basis([Fraction(1, 4), Fraction(3, 8), Fraction(3, 8), Fraction(1, 4)])
    >>> [str(x) for x in kb.origin], kb.vectors
    (['1/8', '1/8', '1/8', '1/8', '1/8'], ((1, -1, 0, -1, 1),))
    """
    l1, l2, l3, l4 = _diamond_rates(rates)
    beta = (l2 + l3 - l1 - l4) / 2
    s = l1 + l4
    b2, b3 = l2 - beta, l3 - beta
    origin = (l1 * b2 / s, l1 * b3 / s, beta, b2 * l4 / s, b3 * l4 / s)
    return KernelBasis.from_vectors(diamond(), origin, [(1, -1, 0, -1, 1)])


def diamond_alpha_range(rates):
    """Closed interval of ``alpha`` over non-negative solutions."""
    kb = diamond_basis(rates)
    mu0 = kb.origin
    return (-min(mu0[0], mu0[4]), min(mu0[1], mu0[3]))


def fish_basis():
    """
    Fish kernel coordinates for rates (4, 4, 3, 2, 3, 2): ``alpha`` moves
    flow from edges 3-6, 4-5 to 3-4, 5-6 and ranges over [-1/2, 1/2].
    """
    return KernelBasis.from_vectors(
        fish(), [3, 1, 1, Fraction(1, 2), Fraction(1, 2), Fraction(3, 2), Fraction(3, 2)],
        [(0, 0, 0, 1, -1, -1, 1)],
    )
