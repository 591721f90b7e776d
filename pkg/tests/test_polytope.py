from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from matchlab import polytope
from matchlab.analytic import fish_basis
from matchlab.errors import GuardError, InfeasibleError, ValidationError
from matchlab.generators import complete_graph, diamond, fish, triangle
from matchlab.graph import incidence_apply
from matchlab.polytope import (
    achievability_report, build_polytope, classify_inequalities, enumerate_vertices,
    maximize_reward, vertices_by_support,
)

from .strategies import rates_for, surjective_graphs

FISH_RATES = [4, 4, 3, 2, 3, 2]


def test_fish_range_in_conventional_coordinates():
    p = build_polytope(fish(), FISH_RATES, basis=fish_basis())
    assert [v.alpha for v in enumerate_vertices(p)] == [(F(-1, 2),), (F(1, 2),)]
    st_ = classify_inequalities(p)
    assert st_.tight == (False, False, False, True, True, False, False)
    assert st_.essential and st_.simple
    assert achievability_report(p).fully_achievable


def test_diamond_vertices_and_redundancy():
    p = build_polytope(diamond(), [4, 5, 2, 1])
    vs = enumerate_vertices(p)
    assert [v.mu for v in vs] == [(4, 0, 1, 0, 1), (3, 1, 1, 1, 0)]
    assert [v.kind for v in vs] == ["injective-only", "bijective"]
    st_ = classify_inequalities(p, vs)
    # 1-3 and 2-4 vanish at the same vertex, so neither is a facet on its own
    assert st_.tight == (False, True, False, True, True)
    assert st_.redundant == (True, True, True, True, False)
    assert not st_.essential and st_.simple


def test_bijective_graph_is_a_point():
    p = build_polytope(triangle(), [3, 4, 5])
    (v,) = enumerate_vertices(p)
    assert v.alpha == () and v.mu == (1, 2, 3)


def test_unstabilizable_rates_rejected():
    with pytest.raises(InfeasibleError):
        build_polytope(triangle(), [5, 1, 1])


def test_basis_rate_mismatch():
    with pytest.raises(ValidationError, match="origin"):
        build_polytope(fish(), [4, 4, 3, 2, 3, 3], basis=fish_basis())


def test_vertex_guard(monkeypatch):
    monkeypatch.setattr(polytope, "VERTEX_GUARD", 3)
    p = build_polytope(complete_graph(5), [1] * 5)
    with pytest.raises(GuardError, match="MATCHLAB_GUARD_OVERRIDE"):
        enumerate_vertices(p)
    monkeypatch.setenv("MATCHLAB_GUARD_OVERRIDE", "1")
    assert enumerate_vertices(p)


@given(surjective_graphs(max_nodes=7), st.data())
def test_vertices_match_support_enumeration(g, data):
    lam = data.draw(rates_for(g, high=9))
    try:
        p = build_polytope(g, lam)
    except InfeasibleError:
        return
    if g.m > 12:
        return
    vs = enumerate_vertices(p)
    assert sorted(v.mu for v in vs) == vertices_by_support(g, lam)
    for v in vs:
        assert incidence_apply(g, list(v.mu)) == list(p.rates)
        assert p.contains(v.alpha)


@given(surjective_graphs(max_nodes=7), st.data())
def test_reward_optimum_matches_floating_lp(g, data):
    lam = data.draw(rates_for(g, high=9))
    w = data.draw(st.lists(st.integers(-5, 5), min_size=g.m, max_size=g.m))
    try:
        p = build_polytope(g, lam)
    except InfeasibleError:
        return
    if g.m > 12:
        return
    opt = maximize_reward(p, w)
    ref = linprog(-np.array(w, float), A_eq=np.array(g.incidence_matrix(), float),
                  b_eq=np.array([float(x) for x in lam]), bounds=[(0, None)] * g.m,
                  method="highs")
    assert float(opt.value) == pytest.approx(-ref.fun, abs=1e-7)
    assert opt.ties >= 1


def test_reward_length_check():
    p = build_polytope(diamond(), [4, 5, 2, 1])
    with pytest.raises(ValidationError, match="length"):
        maximize_reward(p, [1, 2])
