"""
Pure-Python simulation engine.

Slow but literal: FCFM keeps one global FIFO of waiting items and scans it
from the oldest; mixtures may nest anywhere. Used as the oracle for the
compiled kernel and as the fallback for policies it cannot compile.
"""

import numpy as np

from .errors import ValidationError
from .policies import (
    FCFM, EdgePriority, Filter, MatchLongest, Mixture, SemiFilter, ThresholdPriority,
)


class _State:
    def __init__(self, g, policy_u):
        self.q = [0] * g.n
        self.fifo = []
        self.choice = {}
        self.policy_u = policy_u
        self.draws = 0


def _mixtures(spec, path=()):
    if isinstance(spec, Mixture):
        yield path, spec
        yield from _mixtures(spec.first, path + (0,))
        yield from _mixtures(spec.second, path + (1,))
    elif isinstance(spec, Filter):
        yield from _mixtures(spec.inner, path + (0,))


def _candidates(g, q, i, allowed):
    out = []
    for k in g.incident[i]:
        a, b = g.edges[k]
        j = b if a == i else a
        if q[j] > 0 and k in allowed:
            out.append((j, k))
    return out


def _longest(g, q, i, allowed):
    best = None
    for j, k in sorted(_candidates(g, q, i, allowed)):
        if best is None or q[j] > q[best[0]]:
            best = (j, k)
    return best


def _priority(g, q, i, allowed, order):
    rank = {k: r for r, k in enumerate(order)}
    cands = _candidates(g, q, i, allowed)
    return min(cands, key=lambda c: rank[c[1]]) if cands else None


def _decide(spec, g, st, i, allowed, path=()):
    q = st.q
    if isinstance(spec, MatchLongest):
        return _longest(g, q, i, allowed)
    if isinstance(spec, EdgePriority):
        return _priority(g, q, i, allowed, spec.order)
    if isinstance(spec, FCFM):
        for _, j in st.fifo:
            if g.has_edge(i, j):
                k = g.edge_index(i, j)
                if k in allowed:
                    return (j, k)
        return None
    if isinstance(spec, Filter):
        return _decide(spec.inner, g, st, i, allowed & spec.edges, path + (0,))
    if isinstance(spec, SemiFilter):
        if max(q) < spec.k:
            return _longest(g, q, i, allowed & spec.support)
        return _longest(g, q, i, allowed)
    if isinstance(spec, ThresholdPriority):
        order = spec.high if q[spec.watch] >= spec.k else spec.low
        return _priority(g, q, i, allowed, order)
    if isinstance(spec, Mixture):
        sub = spec.first if st.choice[path] == 0 else spec.second
        return _decide(sub, g, st, i, allowed, path + (st.choice[path],))
    raise TypeError(f"unknown policy {spec!r}")


def policy_decide(spec, g, q, i, fifo=None, choice=None):
    """
    Decision of ``spec`` for an arrival of class ``i`` (0-based) in state ``q``.

    Returns the 0-based class to match with, or ``None`` to enqueue. FCFM
    needs ``fifo``, the classes of the waiting items from oldest to newest.
    ``choice`` maps each mixture's tree path to its active branch (0 for the
    first policy) and defaults to the first branch everywhere.

    >>> from matchlab.generators import diamond
    >>> from matchlab.policies import MatchLongest
    >>> policy_decide(MatchLongest(), diamond(), (0, 2, 5, 0), 0)
    2
    """
    if len(q) != g.n or not 0 <= i < g.n:
        raise ValidationError(f"state must have {g.n} entries and class must be in [0, {g.n})")
    st = _State(g, None)
    st.q = list(q)
    if fifo is None and _has_fcfm(spec):
        raise ValidationError("FCFM decisions need the waiting order")
    if fifo is not None:
        if sorted(fifo) != sorted(c for c in range(g.n) for _ in range(q[c])):
            raise ValidationError("waiting order does not match the queue sizes")
        st.fifo = list(enumerate(fifo))
    choice = dict(choice or {})
    for path, _ in _mixtures(spec):
        st.choice[path] = choice.pop(path, 0)
    if choice:
        raise ValidationError(f"no mixture at paths {sorted(choice)}")
    hit = _decide(spec, g, st, i, frozenset(range(g.m)))
    return None if hit is None else hit[0]


def _has_fcfm(spec):
    if isinstance(spec, FCFM):
        return True
    if isinstance(spec, Filter):
        return _has_fcfm(spec.inner)
    if isinstance(spec, Mixture):
        return _has_fcfm(spec.first) or _has_fcfm(spec.second)
    return False


def run(arrivals, g, spec, policy_u, n_batches, mask_bits, hist_cap, record_every):
    """Same inputs and outputs as the compiled kernel, for a policy object."""
    T = len(arrivals)
    n, m = g.n, g.m
    st = _State(g, policy_u)
    mixtures = list(_mixtures(spec))
    L = np.zeros(n, np.int64)
    M = np.zeros(m, np.int64)
    batch_M = np.zeros((n_batches, m), np.int64)
    batch_len = np.zeros(n_batches, np.int64)
    batch_masks = np.zeros((n_batches, 1 << mask_bits if mask_bits else 1), np.int64)
    hist = np.zeros((n, hist_cap + 1), np.int64)
    n_rec = T // record_every if record_every else 0
    rec_q = np.zeros((n_rec, n), np.int64)
    rec_l = np.zeros((n_rec, n), np.int64)
    rec_m = np.zeros((n_rec, m), np.int64)
    everything = frozenset(range(m))
    b = 0
    next_cut = -(-T // n_batches)
    for t in range(T):
        while t >= next_cut:
            b += 1
            next_cut = -(-(b + 1) * T // n_batches)
        batch_len[b] += 1
        q = st.q
        if mask_bits:
            batch_masks[b, sum(1 << c for c in range(n) if q[c])] += 1
        if hist_cap:
            for c in range(n):
                hist[c, min(q[c], hist_cap)] += 1
        i = int(arrivals[t])
        L[i] += 1
        if mixtures and not any(q):
            for path, mix in mixtures:
                st.choice[path] = 0 if policy_u[st.draws] < float(mix.gamma) else 1
                st.draws += 1
        hit = _decide(spec, g, st, i, everything)
        if hit is None:
            q[i] += 1
            st.fifo.append((t, i))
        else:
            j, k = hit
            q[j] -= 1
            M[k] += 1
            batch_M[b, k] += 1
            pos = next(p for p, (_, c) in enumerate(st.fifo) if c == j)
            del st.fifo[pos]
        if record_every and (t + 1) % record_every == 0:
            r = (t + 1) // record_every - 1
            rec_q[r] = q
            rec_l[r] = L
            rec_m[r] = M
    return (np.array(st.q, np.int64), L, M, batch_M, batch_len, batch_masks, hist,
            rec_q, rec_l, rec_m, st.draws)
