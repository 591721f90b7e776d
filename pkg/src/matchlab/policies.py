"""
Matching policy specifications, the policy mini-grammar, and compilation
to the array form consumed by the simulation kernel.

Grammar (node and edge labels are 1-based)::

    ml
    fcfm
    prio:1-2>3-4>1-3            partial orders are completed with the
                                remaining edges in canonical order
    filter(ml;edges=1-2,2-3)
    semifilter(k=64;support=1-2,2-3,3-4)
    thresholdprio(k=64;watch=4;low=1-3>2-3;high=3-4>2-3)
    mix(prio:1-2>3-4,prio:1-3>2-4;gamma=0.5)
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _engine
from ._rational import to_fraction
from .errors import ValidationError
from .graph import classify, parse_edge


@dataclass(frozen=True)
class MatchLongest:
    """Match with the longest compatible queue; ties go to the lowest class."""

    greedy = True

    def label(self, g):
        return "ml"


@dataclass(frozen=True)
class EdgePriority:
    """Match along the highest-priority available edge (``order[0]`` first)."""

    order: tuple
    greedy = True

    def label(self, g):
        return "prio:" + ">".join(g.edge_labels[k] for k in self.order)


@dataclass(frozen=True)
class FCFM:
    """First come, first matched: match the oldest compatible waiting item."""

    greedy = True

    def label(self, g):
        return "fcfm"


@dataclass(frozen=True)
class Filter:
    """Apply ``inner`` as if only the edges in ``edges`` existed."""

    inner: object
    edges: frozenset

    @property
    def greedy(self):
        return False

    def label(self, g):
        return f"filter({self.inner.label(g)};edges={_edge_list(g, self.edges)})"


@dataclass(frozen=True)
class SemiFilter:
    """
    Filtered match-the-longest on ``support`` while the longest queue is
    shorter than ``k``; greedy match-the-longest otherwise.
    """

    k: int
    support: frozenset

    @property
    def greedy(self):
        return self.k == 0

    def label(self, g):
        return f"semifilter(k={self.k};support={_edge_list(g, self.support)})"


@dataclass(frozen=True)
class ThresholdPriority:
    """
    Edge priority ``low`` while ``q[watch] <= k - 1``, ``high`` otherwise.
    ``watch`` is 0-based.
    """

    k: int
    watch: int
    low: tuple
    high: tuple
    greedy = True

    def label(self, g):
        low = ">".join(g.edge_labels[k] for k in self.low)
        high = ">".join(g.edge_labels[k] for k in self.high)
        return f"thresholdprio(k={self.k};watch={self.watch + 1};low={low};high={high})"


@dataclass(frozen=True)
class Mixture:
    """
    Follow ``first`` or ``second`` between visits to the empty state; on each
    visit pick ``first`` with probability ``gamma``.
    """

    first: object
    second: object
    gamma: Fraction

    @property
    def greedy(self):
        return self.first.greedy and self.second.greedy

    def label(self, g):
        return f"mix({self.first.label(g)},{self.second.label(g)};gamma={float(self.gamma):g})"


def _edge_list(g, edges):
    return ",".join(g.edge_labels[k] for k in sorted(edges))


def complete_order(g, order):
    """Append the edges missing from ``order`` in canonical order."""
    order = list(order)
    if len(set(order)) != len(order):
        raise ValidationError("edge repeated in priority order")
    seen = set(order)
    return tuple(order + [k for k in range(g.m) if k not in seen])


def edge_priority(g, labels):
    """Edge-priority policy from 1-based labels, e.g. ``["1-2", "3-4"]``."""
    return EdgePriority(complete_order(g, [parse_edge(x, g) for x in labels]))


def semi_filter_policy(g, k, support, allow_non_injective=False):
    """
    Semi-filtering policy around a vertex with support ``support`` (edge
    indices). The support graph must be injective unless overridden.
    """
    if k < 0:
        raise ValidationError("threshold k must be non-negative")
    support = frozenset(support)
    if not allow_non_injective and not classify(g.subgraph(support)).injective:
        raise ValidationError("support graph is not injective (not a vertex support)")
    return SemiFilter(int(k), support)


def threshold_priority_policy(g, k, watch, low, high):
    """Threshold policy with 0-based ``watch`` and partial orders completed."""
    if k < 0:
        raise ValidationError("threshold k must be non-negative")
    if not 0 <= watch < g.n:
        raise ValidationError(f"watch class {watch + 1} out of range")
    return ThresholdPriority(int(k), int(watch), complete_order(g, low), complete_order(g, high))


def mixture_policy(first, second, gamma):
    gamma = to_fraction(gamma)
    if not 0 <= gamma <= 1:
        raise ValidationError("gamma must lie in [0, 1]")
    return Mixture(first, second, gamma)


def policy_edges_valid(spec, g):
    """Raise unless every edge referenced by ``spec`` belongs to ``g``."""
    def check(edges):
        if any(not 0 <= k < g.m for k in edges):
            raise ValidationError("policy references an edge outside the graph")

    if isinstance(spec, EdgePriority):
        check(spec.order)
        if sorted(spec.order) != list(range(g.m)):
            raise ValidationError("edge-priority order must be a total order on the edges")
    elif isinstance(spec, Filter):
        check(spec.edges)
        if not spec.edges:
            raise ValidationError("filter edge set must be non-empty")
        policy_edges_valid(spec.inner, g)
    elif isinstance(spec, SemiFilter):
        check(spec.support)
    elif isinstance(spec, ThresholdPriority):
        for order in (spec.low, spec.high):
            check(order)
            if sorted(order) != list(range(g.m)):
                raise ValidationError("threshold-priority orders must be total")
        if not 0 <= spec.watch < g.n:
            raise ValidationError("watch class out of range")
    elif isinstance(spec, Mixture):
        policy_edges_valid(spec.first, g)
        policy_edges_valid(spec.second, g)
    elif not isinstance(spec, (MatchLongest, FCFM)):
        raise ValidationError(f"unknown policy {spec!r}")


# -- parsing ---------------------------------------------------------------

def _split_top(text, sep):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValidationError(f"unbalanced parentheses in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ValidationError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def _call(text, name):
    inner = text[len(name):].strip()
    if not (inner.startswith("(") and inner.endswith(")")):
        raise ValidationError(f"expected {name}(...) in {text!r}")
    return inner[1:-1]


def _kv(parts, allowed, context):
    out = {}
    for part in parts:
        if "=" not in part:
            raise ValidationError(f"expected key=value in {context}, got {part!r}")
        key, value = (s.strip() for s in part.split("=", 1))
        if key not in allowed:
            raise ValidationError(f"unknown key {key!r} in {context}")
        if key in out:
            raise ValidationError(f"duplicate key {key!r} in {context}")
        out[key] = value
    missing = [k for k in allowed if k not in out]
    if missing:
        raise ValidationError(f"missing keys {missing} in {context}")
    return out


def _edges(g, text):
    edges = [parse_edge(x, g) for x in text.split(",") if x.strip()]
    if not edges:
        raise ValidationError("empty edge list")
    return frozenset(edges)


def _order(g, text):
    return [parse_edge(x, g) for x in text.split(">") if x.strip()]


def _int(text, what):
    try:
        return int(text)
    except ValueError:
        raise ValidationError(f"{what} must be an integer, got {text!r}") from None


def parse_policy(text, g):
    """
    Parse a policy string against graph ``g``.

    >>> from matchlab.generators import diamond
    >>> d = diamond()
    >>> parse_policy("prio:1-2>3-4", d).label(d)
    'prio:1-2>3-4>1-3>2-3>2-4'
    >>> parse_policy("mix(ml,fcfm;gamma=0.25)", d)
    Mixture(first=MatchLongest(), second=FCFM(), gamma=Fraction(1, 4))
    """
    text = text.strip()
    low = text.lower()
    if low in ("ml", "match-longest"):
        return MatchLongest()
    if low == "fcfm":
        return FCFM()
    if low.startswith("prio:"):
        return EdgePriority(complete_order(g, _order(g, text[5:])))
    if low.startswith("filter"):
        parts = _split_top(_call(text, "filter"), ";")
        inner = parse_policy(parts[0], g)
        kv = _kv(parts[1:], ("edges",), "filter")
        return Filter(inner, _edges(g, kv["edges"]))
    if low.startswith("semifilter"):
        kv = _kv(_split_top(_call(text, "semifilter"), ";"), ("k", "support"), "semifilter")
        return semi_filter_policy(g, _int(kv["k"], "k"), _edges(g, kv["support"]))
    if low.startswith("thresholdprio"):
        kv = _kv(_split_top(_call(text, "thresholdprio"), ";"),
                 ("k", "watch", "low", "high"), "thresholdprio")
        return threshold_priority_policy(
            g, _int(kv["k"], "k"), _int(kv["watch"], "watch") - 1,
            _order(g, kv["low"]), _order(g, kv["high"]),
        )
    if low.startswith("mix"):
        parts = _split_top(_call(text, "mix"), ";")
        subs = _split_top(parts[0], ",")
        if len(subs) != 2:
            raise ValidationError("mix needs exactly two policies")
        kv = _kv(parts[1:], ("gamma",), "mix")
        try:
            gamma = to_fraction(kv["gamma"])
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"bad gamma {kv['gamma']!r}") from None
        return mixture_policy(parse_policy(subs[0], g), parse_policy(subs[1], g), gamma)
    raise ValidationError(f"unknown policy {text!r}")


# -- compilation -------------------------------------------------------------

class Unsupported(Exception):
    """Policy structure outside what the compiled kernel handles."""


@dataclass
class CompiledPolicy:
    leaf_mode: np.ndarray
    leaf_allowed: np.ndarray
    leaf_rank: np.ndarray
    sel_type: np.ndarray
    sel_k: np.ndarray
    sel_watch: np.ndarray
    sel_a: np.ndarray
    sel_b: np.ndarray
    n_regimes: int
    gamma: float


def compile_policy(spec, g):
    """
    Flatten ``spec`` into at most two regimes of at most two leaves each.

    Raises :class:`Unsupported` for nestings the kernel does not cover
    (a mixture below anything other than a filter or another top-level
    mixture component, or a semi-filter inside a threshold policy).
    """
    leaves = []

    def leaf(mode, mask, rank=None):
        leaves.append((mode, mask, rank if rank is not None else np.zeros(g.m, np.int64)))
        return len(leaves) - 1

    def ranks(order):
        r = np.zeros(g.m, np.int64)
        for pos, k in enumerate(order):
            r[k] = pos
        return r

    def regime(s, mask):
        if isinstance(s, MatchLongest):
            return (_engine.SINGLE, 0, 0, leaf(_engine.ML, mask), 0)
        if isinstance(s, FCFM):
            return (_engine.SINGLE, 0, 0, leaf(_engine.FCFM, mask), 0)
        if isinstance(s, EdgePriority):
            return (_engine.SINGLE, 0, 0, leaf(_engine.PRIO, mask, ranks(s.order)), 0)
        if isinstance(s, Filter):
            sub = mask.copy()
            sub[[k for k in range(g.m) if k not in s.edges]] = 0
            return regime(s.inner, sub)
        if isinstance(s, SemiFilter):
            sub = mask.copy()
            sub[[k for k in range(g.m) if k not in s.support]] = 0
            return (_engine.SEMIFILTER, s.k, 0, leaf(_engine.ML, sub), leaf(_engine.ML, mask))
        if isinstance(s, ThresholdPriority):
            return (_engine.THRESHOLD, s.k, s.watch,
                    leaf(_engine.PRIO, mask, ranks(s.low)),
                    leaf(_engine.PRIO, mask, ranks(s.high)))
        raise Unsupported(type(s).__name__)

    def top(s, mask):
        if isinstance(s, Mixture):
            return [regime(s.first, mask), regime(s.second, mask)], float(s.gamma)
        if isinstance(s, Filter) and isinstance(s.inner, Mixture):
            sub = mask.copy()
            sub[[k for k in range(g.m) if k not in s.edges]] = 0
            return top(s.inner, sub)
        return [regime(s, mask)], 1.0

    regimes, gamma = top(spec, np.ones(g.m, np.uint8))
    return CompiledPolicy(
        leaf_mode=np.array([lf[0] for lf in leaves], np.int64),
        leaf_allowed=np.array([lf[1] for lf in leaves], np.uint8).reshape(len(leaves), g.m),
        leaf_rank=np.array([lf[2] for lf in leaves], np.int64).reshape(len(leaves), g.m),
        sel_type=np.array([r[0] for r in regimes], np.int64),
        sel_k=np.array([r[1] for r in regimes], np.int64),
        sel_watch=np.array([r[2] for r in regimes], np.int64),
        sel_a=np.array([r[3] for r in regimes], np.int64),
        sel_b=np.array([r[4] for r in regimes], np.int64),
        n_regimes=len(regimes),
        gamma=gamma,
    )


def uses_randomness(spec):
    if isinstance(spec, Mixture):
        return True
    if isinstance(spec, Filter):
        return uses_randomness(spec.inner)
    return False
