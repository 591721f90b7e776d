"""
Compatibility graphs and their classification by the incidence map.

Node indices are 1-based at every user-facing boundary (``build_graph``,
JSON files, policy strings, CLI output) and 0-based inside
:class:`MatchingGraph`. Edges are stored in canonical order: sorted
lexicographically by ``(min endpoint, max endpoint)``; an edge is
identified by its position in that order.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import GuardError, ValidationError, guard_override

class GraphError(ValidationError):
    """Invalid graph input."""


@dataclass(frozen=True)
class MatchingGraph:
    """
    Simple undirected compatibility graph.

    Attributes
    ----------
    n: :class:`int`
        Number of classes (nodes).
    edges: :class:`tuple`
        Canonically ordered 0-based pairs ``(i, j)`` with ``i < j``.
    neighbors: :class:`tuple` of :class:`frozenset`
        ``neighbors[i]`` is V_i.
    incident: :class:`tuple` of :class:`tuple`
        ``incident[i]`` lists the indices of the edges containing node i (E_i).
    """

    n: int
    edges: tuple
    neighbors: tuple = field(repr=False, compare=False)
    incident: tuple = field(repr=False, compare=False)
    _index: dict = field(repr=False, compare=False)

    @property
    def m(self):
        return len(self.edges)

    def edge_index(self, i, j):
        """Index of the 0-based edge ``{i, j}``; raises :class:`KeyError`."""
        return self._index[(min(i, j), max(i, j))]

    def has_edge(self, i, j):
        return (min(i, j), max(i, j)) in self._index

    @property
    def edge_labels(self):
        """1-based labels such as ``"1-2"``, in canonical order."""
        return tuple(f"{i + 1}-{j + 1}" for i, j in self.edges)

    @property
    def degrees(self):
        return tuple(len(e) for e in self.incident)

    def incidence_matrix(self):
        """Dense n x m 0/1 incidence matrix as nested lists of ints."""
        a = [[0] * self.m for _ in range(self.n)]
        for k, (i, j) in enumerate(self.edges):
            a[i][k] = 1
            a[j][k] = 1
        return a

    def subgraph(self, edge_ids):
        """Spanning subgraph keeping only the given edge indices."""
        return _from_pairs(self.n, [self.edges[k] for k in sorted(set(edge_ids))])

    def to_dict(self):
        return {"n": self.n, "edges": [[i + 1, j + 1] for i, j in self.edges]}

    def __str__(self):
        return f"MatchingGraph(n={self.n}, edges=[{', '.join(self.edge_labels)}])"


def _from_pairs(n, pairs):
    edges = tuple(sorted(pairs))
    index = {e: k for k, e in enumerate(edges)}
    nbrs = [set() for _ in range(n)]
    inc = [[] for _ in range(n)]
    for k, (i, j) in enumerate(edges):
        nbrs[i].add(j)
        nbrs[j].add(i)
        inc[i].append(k)
        inc[j].append(k)
    return MatchingGraph(
        n=n,
        edges=edges,
        neighbors=tuple(frozenset(s) for s in nbrs),
        incident=tuple(tuple(x) for x in inc),
        _index=index,
    )


def build_graph(n, edge_pairs):
    """
    Build a graph from 1-based node pairs.

    Parameters
    ----------
    n: :class:`int`
        Number of nodes.
    edge_pairs: iterable of pairs
        Unordered 1-based pairs.

    Returns
    -------
    :class:`MatchingGraph`

    Examples
    --------

    >>> g = build_graph(4, [(1, 2), (1, 3), (2, 4), (3, 4), (2, 3)])
    >>> g.edge_labels
    ('1-2', '1-3', '2-3', '2-4', '3-4')
    >>> build_graph(2, [(1, 1)])
    Traceback (most recent call last):
    ...
    matchlab.graph.GraphError: self-loop on node 1
    """
    if int(n) != n or n < 1:
        raise GraphError(f"node count must be a positive integer, got {n!r}")
    n = int(n)
    seen = set()
    for pair in edge_pairs:
        if len(pair) != 2:
            raise GraphError(f"edge {pair!r} is not a pair")
        i, j = (int(v) for v in pair)
        for v in (i, j):
            if not 1 <= v <= n:
                raise GraphError(f"node index {v} out of range 1..{n}")
        if i == j:
            raise GraphError(f"self-loop on node {i}")
        e = (min(i, j) - 1, max(i, j) - 1)
        if e in seen:
            raise GraphError(f"duplicate edge {e[0] + 1}-{e[1] + 1}")
        seen.add(e)
    return _from_pairs(n, seen)


def parse_edge(label, g=None):
    """
    Parse a 1-based edge label ``"i-j"`` into a 0-based pair, or into an
    edge index when ``g`` is given.
    """
    try:
        a, b = label.strip().split("-")
        i, j = int(a) - 1, int(b) - 1
    except ValueError:
        raise GraphError(f"malformed edge label {label!r}") from None
    if g is None:
        return (min(i, j), max(i, j))
    if not g.has_edge(i, j):
        raise GraphError(f"edge {label.strip()} is not in the graph")
    return g.edge_index(i, j)


def connected_components(g):
    """Node sets of the connected components, ordered by smallest node."""
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in sorted(g.neighbors[u]):
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(tuple(sorted(comp)))
    return comps


def bfs_tree(g, root):
    """
    Breadth-first spanning tree of the component of ``root``.

    Neighbors are visited in increasing index order, so the tree is
    deterministic. Returns ``(parent, depth, tree_edges)`` where ``parent``
    and ``depth`` are dicts over the reached nodes and ``tree_edges`` is a
    set of edge indices.
    """
    parent = {root: None}
    depth = {root: 0}
    tree = set()
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in sorted(g.neighbors[u]):
            if v not in parent:
                parent[v] = u
                depth[v] = depth[u] + 1
                tree.add(g.edge_index(u, v))
                queue.append(v)
    return parent, depth, tree


def tree_path(parent, depth, u, v):
    """Node path from u to v in a rooted tree given by parent/depth maps."""
    left, right = [u], [v]
    while depth[u] > depth[v]:
        u = parent[u]
        left.append(u)
    while depth[v] > depth[u]:
        v = parent[v]
        right.append(v)
    while u != v:
        u, v = parent[u], parent[v]
        left.append(u)
        right.append(v)
    right.pop()
    return left + right[::-1]


@dataclass(frozen=True)
class ComponentInfo:
    nodes: tuple
    edge_count: int
    is_bipartite: bool
    parts: tuple = None

    @property
    def is_tree(self):
        return self.edge_count == len(self.nodes) - 1

    @property
    def is_odd_unicyclic(self):
        return self.edge_count == len(self.nodes) and not self.is_bipartite


@dataclass(frozen=True)
class GraphClassification:
    components: tuple
    kind: str
    nullity_A: int
    nullity_At: int

    @property
    def surjective(self):
        return self.kind in ("bijective", "surjective-only")

    @property
    def injective(self):
        return self.kind in ("bijective", "injective-only")

    @property
    def bipartite_components(self):
        return tuple(c for c in self.components if c.is_bipartite)


def _two_coloring(g, nodes):
    color = {}
    ok = True
    for s in nodes:
        if s in color:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in g.neighbors[u]:
                if v not in color:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    ok = False
    return ok, color


def classify(g):
    """
    Classify a graph by the surjectivity/injectivity of its incidence map.

    A bipartite component contributes ``m_c - n_c + 1`` to the nullity of A
    and 1 to the nullity of its transpose; a non-bipartite component
    contributes ``m_c - n_c`` and 0.

    Examples
    --------

    >>> c4 = build_graph(4, [(1, 2), (1, 3), (2, 4), (3, 4)])
    >>> r = classify(c4)
    >>> r.kind, r.nullity_A, r.nullity_At
    ('neither', 1, 1)
    >>> paw = build_graph(4, [(1, 2), (1, 3), (2, 3), (3, 4)])
    >>> classify(paw).kind
    'bijective'
    """
    comps = []
    null_a = null_at = 0
    for nodes in connected_components(g):
        node_set = set(nodes)
        m_c = sum(1 for i, j in g.edges if i in node_set)
        bip, color = _two_coloring(g, nodes)
        parts = None
        if bip:
            parts = (
                tuple(v for v in nodes if color[v] == 0),
                tuple(v for v in nodes if color[v] == 1),
            )
            null_a += m_c - len(nodes) + 1
            null_at += 1
        else:
            null_a += m_c - len(nodes)
        comps.append(ComponentInfo(nodes, m_c, bip, parts))
    surj = all(not c.is_bipartite for c in comps)
    inj = all(c.is_tree or c.is_odd_unicyclic for c in comps)
    kind = {
        (True, True): "bijective",
        (True, False): "surjective-only",
        (False, True): "injective-only",
        (False, False): "neither",
    }[(surj, inj)]
    return GraphClassification(tuple(comps), kind, null_a, null_at)


def find_odd_cycle(g, nodes=None):
    """
    First odd cycle found by BFS from the smallest node, as a node list,
    or ``None`` if the (sub)graph is bipartite.

    The closing edge is the smallest-index non-tree edge joining two nodes
    of equal depth parity.
    """
    roots = nodes if nodes is not None else range(g.n)
    done = set()
    for r in roots:
        if r in done:
            continue
        parent, depth, tree = bfs_tree(g, r)
        done.update(parent)
        for k, (i, j) in enumerate(g.edges):
            if i in parent and k not in tree and depth[i] % 2 == depth[j] % 2:
                return tree_path(parent, depth, i, j)
    return None


@dataclass(frozen=True)
class IndependentSet:
    """Non-empty independent set with its neighborhood V(I), 0-based."""

    nodes: tuple
    neighborhood: frozenset

    def labels(self):
        return [v + 1 for v in self.nodes]


def enumerate_independent_sets(g, node_limit=20):
    """
    All non-empty independent sets, ordered by size then lexicographically.

    Branch-and-bound over node index order. Refuses graphs with more than
    ``node_limit`` nodes.

    >>> d = build_graph(4, [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)])
    >>> [s.labels() for s in enumerate_independent_sets(d)]
    [[1], [2], [3], [4], [1, 4]]
    """
    if g.n > node_limit and not guard_override():
        raise GuardError(f"independent-set enumeration refused: n={g.n} > limit {node_limit}")
    out = []

    def grow(current, start, banned):
        for v in range(start, g.n):
            if v in banned:
                continue
            nxt = current + (v,)
            out.append(nxt)
            grow(nxt, v + 1, banned | g.neighbors[v])

    grow((), 0, frozenset())
    out.sort(key=lambda s: (len(s), s))
    for s in out:
        nb = frozenset().union(*(g.neighbors[v] for v in s))
        yield IndependentSet(s, nb)


def incidence_apply(g, y):
    """
    Compute ``A y`` where ``(A y)_i`` is the sum of ``y`` over edges at i.

    >>> tri = build_graph(3, [(1, 2), (1, 3), (2, 3)])
    >>> incidence_apply(tri, [1, 2, 3])
    [3, 4, 5]
    """
    if len(y) != g.m:
        raise GraphError(f"vector has length {len(y)}, expected m={g.m}")
    zero = Fraction(0) if any(isinstance(v, Fraction) for v in y) else 0
    return [sum((y[k] for k in g.incident[i]), zero) for i in range(g.n)]


def node_distances(g, sources):
    """BFS distance from a set of source nodes to every reachable node."""
    dist = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        u = queue.popleft()
        for v in g.neighbors[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def diameter(g):
    """Diameter of a connected graph (raises on disconnected graphs)."""
    best = 0
    for s in range(g.n):
        d = node_distances(g, [s])
        if len(d) < g.n:
            raise GraphError("graph is disconnected")
        best = max(best, max(d.values()))
    return best


def is_connected(g):
    return len(connected_components(g)) == 1
