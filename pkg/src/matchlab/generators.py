"""
Named compatibility graphs and random graph generators.

All named graphs use the node labels of the usual figures, so edge indices
follow the canonical order of those labels.
"""

import random
from fractions import Fraction

from .graph import build_graph, classify


def triangle():
    return build_graph(3, [(1, 2), (1, 3), (2, 3)])


def square():
    """The 4-cycle: bipartite with a cycle, neither surjective nor injective."""
    return build_graph(4, [(1, 2), (1, 3), (2, 4), (3, 4)])


def diamond():
    """Two triangles sharing edge 2-3; edges (12, 13, 23, 24, 34)."""
    return build_graph(4, [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)])


def claw():
    """Tree with center 3 and leaves 1, 2, 4: injective-only."""
    return build_graph(4, [(1, 3), (2, 3), (3, 4)])


def paw():
    """Triangle 1-2-3 with pendant node 4 attached to 3: bijective."""
    return build_graph(4, [(1, 2), (1, 3), (2, 3), (3, 4)])


def cycle_graph(n):
    return build_graph(n, [(i, i + 1) for i in range(1, n)] + [(1, n)])


def path_graph(n):
    return build_graph(n, [(i, i + 1) for i in range(1, n)])


def complete_graph(n):
    return build_graph(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def pentagon():
    return cycle_graph(5)


def lying_puppet():
    """Triangle 1-2-3 with a tree hanging from node 3 (9 nodes, bijective)."""
    return build_graph(9, [(1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (4, 6), (4, 7), (7, 8), (7, 9)])


def codomino():
    """
    Three squares sharing edges, with diagonals 2-6 and 3-5.

    >>> codomino().edge_labels
    ('1-2', '1-6', '2-3', '2-6', '3-4', '3-5', '4-5', '5-6')
    """
    return build_graph(6, [(1, 2), (1, 6), (2, 3), (2, 6), (3, 4), (3, 5), (4, 5), (5, 6)])


def triamond():
    """Three triangles 1-2-5, 2-4-5, 2-3-4 glued along edges."""
    return build_graph(5, [(1, 2), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (4, 5)])


def fish():
    """
    Triangle 1-2-3 ("head") and square 3-4-5-6 ("tail").

    >>> fish().edge_labels
    ('1-2', '1-3', '2-3', '3-4', '3-6', '4-5', '5-6')
    """
    return build_graph(6, [(1, 2), (1, 3), (2, 3), (3, 4), (3, 6), (4, 5), (5, 6)])


def whirl():
    """
    Ten-node, 13-edge graph whose rate polytope is a non-simple pyramid.

    >>> whirl().m
    13
    """
    return build_graph(10, [
        (1, 2), (1, 8), (1, 9), (2, 3), (2, 9), (3, 4), (3, 7),
        (4, 5), (5, 6), (5, 10), (6, 7), (6, 10), (7, 8),
    ])


def kayak_paddle(left, right, path):
    """
    Two odd cycles of lengths ``left`` and ``right`` joined by a path with
    ``path`` edges (``path = 0`` means the cycles share a node).
    """
    pairs = [(i, i + 1) for i in range(1, left)] + [(1, left)]
    a = left
    nxt = left + 1
    for _ in range(path):
        pairs.append((a, nxt))
        a, nxt = nxt, nxt + 1
    ring = [a] + list(range(nxt, nxt + right - 1))
    pairs += [(ring[t], ring[(t + 1) % right]) for t in range(right)]
    return build_graph(nxt + right - 2, pairs)


NAMED_GRAPHS = {
    "triangle": triangle,
    "square": square,
    "diamond": diamond,
    "claw": claw,
    "paw": paw,
    "pentagon": pentagon,
    "lying-puppet": lying_puppet,
    "codomino": codomino,
    "triamond": triamond,
    "fish": fish,
    "whirl": whirl,
    "k4": lambda: complete_graph(4),
}


def _rng(seed):
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def _random_tree_pairs(nodes, rng):
    nodes = list(nodes)
    rng.shuffle(nodes)
    return [(nodes[t], nodes[rng.randrange(t)]) for t in range(1, len(nodes))]


def random_connected_graph(n, extra_edges, seed=None):
    """Random spanning tree plus ``extra_edges`` random chords (1-based API)."""
    rng = _rng(seed)
    pairs = {tuple(sorted(p)) for p in _random_tree_pairs(range(1, n + 1), rng)}
    missing = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if (i, j) not in pairs]
    pairs.update(rng.sample(missing, min(extra_edges, len(missing))))
    return build_graph(n, pairs)


def random_surjective_graph(n, seed=None, extra_edges=None, components=1):
    """
    Random graph whose components are all connected and non-bipartite.

    ``extra_edges`` counts chords beyond the spanning forest (at least one
    odd cycle is forced in each component); by default it is drawn at random.
    """
    rng = _rng(seed)
    if n < 3 * components:
        raise ValueError("each component needs at least three nodes")
    cuts = sorted(rng.sample(range(3, n - 2), components - 1)) if components > 1 else []
    sizes, prev = [], 0
    for c in cuts + [n]:
        sizes.append(c - prev)
        prev = c
    if any(s < 3 for s in sizes):
        return random_surjective_graph(n, rng, extra_edges, components)
    pairs, offset = [], 0
    for size in sizes:
        extra = extra_edges if extra_edges is not None else rng.randint(1, max(1, size))
        sub = random_connected_graph(size, extra, rng)
        cls = classify(sub)
        sub_pairs = [(i + 1, j + 1) for i, j in sub.edges]
        if not cls.surjective:
            part = max(cls.components[0].parts, key=len)
            i, j = rng.sample(part, 2)
            sub_pairs.append((i + 1, j + 1))
        pairs += [(i + offset, j + offset) for i, j in sub_pairs]
        offset += size
    return build_graph(n, pairs)


def random_bijective_graph(n, seed=None, components=1):
    """Random graph whose components are odd cycles with hanging trees."""
    rng = _rng(seed)
    sizes = [3] * components
    for _ in range(n - 3 * components):
        sizes[rng.randrange(components)] += 1
    pairs, offset = [], 0
    for size in sizes:
        length = rng.choice(range(3, size + 1, 2))
        ring = list(range(1, length + 1))
        rng.shuffle(ring)
        ring_pairs = [(ring[t], ring[(t + 1) % length]) for t in range(length)]
        extra = []
        for v in range(length + 1, size + 1):
            extra.append((v, rng.randint(1, v - 1)))
        # relabel so the cycle is not always on the smallest nodes
        perm = list(range(1, size + 1))
        rng.shuffle(perm)
        pairs += [(perm[i - 1] + offset, perm[j - 1] + offset) for i, j in ring_pairs + extra]
        offset += size
    return build_graph(n, pairs)


def random_rates(n, seed=None, low=1, high=20, denominator=1):
    """Random positive rational rates ``k / denominator`` with k in [low, high]."""
    rng = _rng(seed)
    return tuple(Fraction(rng.randint(low, high), denominator) for _ in range(n))
