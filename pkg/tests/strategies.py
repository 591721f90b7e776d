"""Hypothesis strategies shared by the property tests."""

import random

from hypothesis import strategies as st

from matchlab.generators import random_bijective_graph, random_rates, random_surjective_graph
from matchlab.graph import build_graph


@st.composite
def graphs(draw, max_nodes=9):
    """Arbitrary simple graphs, possibly disconnected, with at least one edge."""
    n = draw(st.integers(2, max_nodes))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, unique=True))
    return build_graph(n, chosen)


@st.composite
def surjective_graphs(draw, max_nodes=12):
    n = draw(st.integers(3, max_nodes))
    seed = draw(st.integers(0, 2**32))
    comps = draw(st.integers(1, max(1, n // 4)))
    return random_surjective_graph(n, random.Random(seed), components=comps)


@st.composite
def bijective_graphs(draw, max_nodes=20):
    n = draw(st.integers(3, max_nodes))
    seed = draw(st.integers(0, 2**32))
    return random_bijective_graph(n, random.Random(seed), components=draw(st.integers(1, n // 3)))


@st.composite
def rates_for(draw, g, high=20):
    seed = draw(st.integers(0, 2**32))
    return random_rates(g.n, random.Random(seed), 1, high, denominator=draw(st.integers(1, 4)))
