import networkx as nx
import pytest
import sympy
from hypothesis import given

from matchlab.errors import GuardError
from matchlab.generators import (
    NAMED_GRAPHS, claw, codomino, complete_graph, cycle_graph, diamond, kayak_paddle, path_graph,
    square,
)
from matchlab.graph import (
    GraphError, build_graph, classify, connected_components, diameter, enumerate_independent_sets,
    find_odd_cycle, incidence_apply, is_connected, parse_edge,
)

from .strategies import graphs


def _nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def test_build_graph_triangle():
    g = build_graph(3, [(1, 2), (1, 3), (2, 3)])
    assert g.m == 3 and g.n == 3


def test_canonical_order_diamond():
    g = build_graph(4, [(1, 2), (1, 3), (2, 4), (3, 4), (2, 3)])
    assert g.edge_labels == ("1-2", "1-3", "2-3", "2-4", "3-4")
    assert g.edge_index(2, 1) == g.edge_index(1, 2) == 2


@pytest.mark.parametrize(
    "n, pairs, message",
    [
        (2, [(1, 1)], "self-loop"),
        (3, [(1, 2), (2, 1)], "duplicate"),
        (3, [(1, 4)], "out of range"),
        (0, [], "positive"),
        (3, [(1, 2, 3)], "not a pair"),
    ],
)
def test_build_graph_rejects(n, pairs, message):
    with pytest.raises(GraphError, match=message):
        build_graph(n, pairs)


@pytest.mark.parametrize(
    "name, kind",
    [
        ("triangle", "bijective"), ("square", "neither"), ("diamond", "surjective-only"),
        ("claw", "injective-only"), ("paw", "bijective"), ("pentagon", "bijective"),
        ("lying-puppet", "bijective"), ("codomino", "surjective-only"),
        ("triamond", "surjective-only"), ("fish", "surjective-only"),
        ("whirl", "surjective-only"), ("k4", "surjective-only"),
    ],
)
def test_named_graph_kinds(name, kind):
    assert classify(NAMED_GRAPHS[name]()).kind == kind


@pytest.mark.parametrize("left, right, path", [(3, 3, 0), (3, 3, 1), (3, 5, 2), (5, 7, 3)])
def test_kayak_paddle_shape(left, right, path):
    g = kayak_paddle(left, right, path)
    assert g.m - g.n == 1
    assert classify(g).kind == "surjective-only"


def test_components_of_union():
    g = build_graph(6, [(1, 2), (2, 3), (1, 3), (4, 5)])
    comps = connected_components(g)
    assert [c for c in comps] == [(0, 1, 2), (3, 4), (5,)]
    assert not is_connected(g)


def test_isolated_node_is_a_tree():
    # a lone node is bipartite: the graph is not surjective
    g = build_graph(4, [(1, 2), (2, 3), (1, 3)])
    assert classify(g).kind == "injective-only"


@given(graphs())
def test_nullity_identity(g):
    c = classify(g)
    assert c.nullity_A - c.nullity_At == g.m - g.n


@given(graphs())
def test_nullities_match_exact_rank(g):
    rank = sympy.Matrix(g.incidence_matrix()).rank()
    c = classify(g)
    assert c.nullity_A == g.m - rank
    assert c.nullity_At == g.n - rank


@given(graphs())
def test_bipartite_flags_match_networkx(g):
    h = _nx(g)
    c = classify(g)
    for comp in c.components:
        assert comp.is_bipartite == nx.is_bipartite(h.subgraph(comp.nodes))
    assert c.surjective == all(not nx.is_bipartite(h.subgraph(s))
                               for s in nx.connected_components(h))


@given(graphs())
def test_odd_cycle_is_a_cycle_of_odd_length(g):
    cyc = find_odd_cycle(g)
    if cyc is None:
        assert nx.is_bipartite(_nx(g))
        return
    assert len(cyc) % 2 == 1 and len(set(cyc)) == len(cyc)
    for t in range(len(cyc)):
        assert g.has_edge(cyc[t], cyc[(t + 1) % len(cyc)])


@given(graphs(max_nodes=8))
def test_independent_sets_match_brute_force(g):
    found = {s.nodes for s in enumerate_independent_sets(g)}
    h = _nx(g)
    want = set()
    for mask in range(1, 1 << g.n):
        s = tuple(v for v in range(g.n) if mask >> v & 1)
        if not any(h.has_edge(a, b) for a in s for b in s if a < b):
            want.add(s)
    assert found == want


def test_independent_set_guard(monkeypatch):
    g = path_graph(21)
    with pytest.raises(GuardError):
        list(enumerate_independent_sets(g))
    monkeypatch.setenv("MATCHLAB_GUARD_OVERRIDE", "1")
    assert next(iter(enumerate_independent_sets(g))).nodes == (0,)


def test_incidence_matrix_shape():
    a = diamond().incidence_matrix()
    assert len(a) == 4 and all(len(r) == 5 for r in a)
    assert [sum(r) for r in a] == [2, 3, 3, 2]


def test_incidence_apply_length_check():
    with pytest.raises(GraphError):
        incidence_apply(diamond(), [1, 2])


def test_parse_edge():
    g = codomino()
    assert parse_edge("6-1", g) == g.edge_index(0, 5)
    assert parse_edge(" 2-3 ") == (1, 2)
    with pytest.raises(GraphError, match="not in the graph"):
        parse_edge("1-3", g)
    with pytest.raises(GraphError, match="malformed"):
        parse_edge("1+3")


def test_subgraph_keeps_nodes():
    g = square()
    sub = g.subgraph([0])
    assert sub.n == 4 and sub.m == 1


@pytest.mark.parametrize("g, d", [(cycle_graph(7), 3), (complete_graph(5), 1), (claw(), 2)])
def test_diameter(g, d):
    assert diameter(g) == d
