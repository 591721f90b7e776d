"""
Structural basis of ker(A) from even cycles and kayak paddles, and the
change of coordinates ``mu = mu0 + B alpha``.

Deterministic choices: the spanning tree is the BFS tree from the smallest
node of each component (neighbors in increasing order); the augmenting edge
is the smallest-index non-tree edge closing an odd cycle; generating edges
are processed in canonical order. An even cycle is traversed from its
smallest node towards that node's smaller cycle neighbor. In a kayak paddle
the first cycle is the one holding the smaller node index; each cycle is
traversed from its attachment node towards the smaller neighbor, and path
signs start at +2 next to the first cycle.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from . import _rational as qr
from .errors import ValidationError
from .graph import bfs_tree, classify, incidence_apply, tree_path


@dataclass(frozen=True)
class SupportKind:
    """``kind`` is ``"even-cycle"`` or ``"kayak-paddle"`` (with l, r, p)."""

    kind: str
    left: int = None
    right: int = None
    path: int = None

    def __str__(self):
        if self.kind == "even-cycle":
            return "even-cycle"
        return f"kayak-paddle({self.left},{self.right},{self.path})"


def _cycle_edges(g, nodes):
    return [g.edge_index(nodes[t], nodes[(t + 1) % len(nodes)]) for t in range(len(nodes))]


def _traverse(g, edge_set, start):
    """
    Node walk around the cycle formed by ``edge_set`` from ``start``,
    heading to the smaller neighbor first. Returns the edge list in order.
    """
    adj = {}
    for k in edge_set:
        i, j = g.edges[k]
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)
    prev, cur = start, min(adj[start])
    out = [g.edge_index(start, cur)]
    while cur != start:
        nxt = next(v for v in sorted(adj[cur]) if v != prev)
        out.append(g.edge_index(cur, nxt))
        prev, cur = cur, nxt
    return out


def _cycle_nodes(g, edge_set):
    return {v for k in edge_set for v in g.edges[k]}


def _fundamental_cycle(g, parent, depth, k):
    i, j = g.edges[k]
    nodes = tree_path(parent, depth, i, j)
    return set(_cycle_edges(g, nodes))


def _component_basis(g, nodes):
    root = min(nodes)
    parent, depth, tree = bfs_tree(g, root)
    node_set = set(nodes)
    chords = sorted(k for k, (i, _) in enumerate(g.edges) if i in node_set and k not in tree)
    if not chords:
        return tree, None, []
    a = next(
        (k for k in chords if depth[g.edges[k][0]] % 2 == depth[g.edges[k][1]] % 2), None
    )
    if a is None:
        raise ValidationError("component is bipartite")
    c_a = _fundamental_cycle(g, parent, depth, a)
    out = []
    for s in chords:
        if s == a:
            continue
        b = [0] * g.m
        c_s = _fundamental_cycle(g, parent, depth, s)
        if len(c_s) % 2 == 0 or c_s & c_a:
            cyc = c_s if len(c_s) % 2 == 0 else c_s ^ c_a
            start = min(_cycle_nodes(g, cyc))
            for d, k in enumerate(_traverse(g, cyc, start), 1):
                b[k] = (-1) ** d
            out.append((s, tuple(b), SupportKind("even-cycle")))
            continue
        # kayak paddle: two edge-disjoint odd cycles joined by a tree path
        first, second = sorted((c_a, c_s), key=lambda c: min(_cycle_nodes(g, c)))
        n1, n2 = _cycle_nodes(g, first), _cycle_nodes(g, second)
        walk = tree_path(parent, depth, min(n1), min(n2))
        i0 = max(t for t, v in enumerate(walk) if v in n1)
        j0 = next(t for t in range(i0, len(walk)) if walk[t] in n2)
        bridge = walk[i0 : j0 + 1]
        vi, vj = bridge[0], bridge[-1]
        p = len(bridge) - 1
        for d, k in enumerate(_traverse(g, first, vi), 1):
            b[k] = (-1) ** d
        for d in range(1, p + 1):
            b[g.edge_index(bridge[d - 1], bridge[d])] = 2 * (-1) ** (d + 1)
        for d, k in enumerate(_traverse(g, second, vj), 1):
            b[k] = (-1) ** (d + p + 1)
        out.append((s, tuple(b), SupportKind("kayak-paddle", len(first), len(second), p)))
    return tree, a, out


@dataclass(frozen=True)
class KernelBasis:
    """
    Origin ``mu0`` and basis vectors ``B = (b_1, ..., b_d)`` of ker(A).

    ``vectors`` are integer tuples in canonical edge order. ``kinds``,
    ``generators``, ``spanning_tree`` and ``augmenting_edges`` describe the
    structural construction and are ``None`` for user-supplied bases.
    """

    graph: object = field(repr=False)
    origin: tuple
    vectors: tuple
    kinds: tuple = None
    generators: tuple = None
    spanning_tree: frozenset = None
    augmenting_edges: tuple = None

    @property
    def d(self):
        return len(self.vectors)

    @property
    def rates(self):
        return tuple(incidence_apply(self.graph, list(self.origin)))

    def gram_inverse(self):
        """``(B^T B)^{-1}`` as a d x d list of fractions."""
        gram = [[sum(x * y for x, y in zip(u, v)) for v in self.vectors] for u in self.vectors]
        return qr.inverse(gram) if self.d else []

    def pseudo_inverse(self):
        """``B^+ = (B^T B)^{-1} B^T`` as a d x m list of fractions."""
        if not self.d:
            return []
        return qr.matmul(self.gram_inverse(), [list(v) for v in self.vectors])

    def to_edge_coords(self, alpha):
        """
        ``mu = mu0 + sum_j alpha_j b_j`` (exact when alpha is rational).
        """
        if len(alpha) != self.d:
            raise ValidationError(f"expected {self.d} kernel coordinates, got {len(alpha)}")
        alpha = qr.to_fractions(alpha)
        mu = list(self.origin)
        for a, b in zip(alpha, self.vectors):
            if a:
                for k, v in enumerate(b):
                    if v:
                        mu[k] += a * v
        return tuple(mu)

    def to_kernel_coords(self, mu):
        """
        ``alpha = B^+ (mu - mu0)``; rejects non-conservative ``mu``.
        """
        mu = qr.to_fractions(mu)
        if len(mu) != self.graph.m:
            raise ValidationError(f"expected {self.graph.m} edge coordinates, got {len(mu)}")
        residual = [
            a - b for a, b in zip(incidence_apply(self.graph, list(mu)), self.rates)
        ]
        if any(residual):
            raise NonConservativeError(residual)
        delta = [a - b for a, b in zip(mu, self.origin)]
        return tuple(qr.matvec(self.pseudo_inverse(), delta))

    def with_origin(self, origin):
        return KernelBasis(self.graph, qr.to_fractions(origin), self.vectors, self.kinds,
                           self.generators, self.spanning_tree, self.augmenting_edges)

    @classmethod
    def from_vectors(cls, g, origin, vectors):
        """Wrap a user-supplied basis after checking it spans ker(A)."""
        origin = qr.to_fractions(origin)
        vectors = tuple(tuple(int(v) if Fraction(v).denominator == 1 else Fraction(v) for v in b)
                        for b in vectors)
        cls_ = classify(g)
        if len(origin) != g.m or any(len(b) != g.m for b in vectors):
            raise ValidationError("basis vectors and origin must have length m")
        for b in vectors:
            if any(incidence_apply(g, list(b))):
                raise ValidationError(f"vector {b} is not in the kernel of A")
        if len(vectors) != cls_.nullity_A or qr.rank(vectors) != len(vectors):
            raise ValidationError(f"need {cls_.nullity_A} independent kernel vectors")
        return cls(g, origin, vectors)


class NonConservativeError(ValidationError):
    def __init__(self, residual):
        self.residual = tuple(residual)
        super().__init__(f"flow is not conservative; residual A mu - lambda = "
                         f"{[str(r) for r in self.residual]}")


def kernel_basis(g, origin=None, rates=None):
    """
    Basis of ker(A) built from even cycles and kayak paddles.

    Parameters
    ----------
    g: :class:`~matchlab.graph.MatchingGraph`
        Surjective graph.
    origin: sequence, optional
        Conservative particular solution used as the origin.
    rates: sequence, optional
        When ``origin`` is omitted, the origin is the maximin solution for
        these rates, or the zero vector if no rates are given either.

    Examples
    --------

    >>> from matchlab.generators import codomino
    >>> kb = kernel_basis(codomino())
    >>> kb.vectors
    ((0, 0, -1, 1, 0, 1, 0, -1), (-1, 1, 1, 0, -1, 0, 1, -1))
    >>> [str(k) for k in kb.kinds]
    ['even-cycle', 'even-cycle']
    """
    cls = classify(g)
    if not cls.surjective:
        raise ValidationError(f"kernel construction requires a surjective graph; got {cls.kind}")
    if origin is None:
        if rates is not None:
            from .conservation import maximin_solution

            origin = maximin_solution(g, rates).flow
        else:
            origin = (Fraction(0),) * g.m
    origin = qr.to_fractions(origin)
    if len(origin) != g.m:
        raise ValidationError(f"origin has length {len(origin)}, expected {g.m}")
    tree, augment, items = set(), [], []
    for comp in cls.components:
        t, a, out = _component_basis(g, comp.nodes)
        tree |= t
        if a is not None:
            augment.append(a)
        items += out
    items.sort(key=lambda it: it[0])
    return KernelBasis(
        graph=g,
        origin=origin,
        vectors=tuple(it[1] for it in items),
        kinds=tuple(it[2] for it in items),
        generators=tuple(it[0] for it in items),
        spanning_tree=frozenset(tree),
        augmenting_edges=tuple(augment),
    )


def to_edge_coords(basis, alpha):
    return basis.to_edge_coords(alpha)


def to_kernel_coords(basis, mu):
    return basis.to_kernel_coords(mu)
