"""Compiled simulation core. See :mod:`matchlab.simulator` for the public API."""

import numpy as np
from numba import njit

ML, PRIO, FCFM = 0, 1, 2
SINGLE, SEMIFILTER, THRESHOLD = 0, 1, 2


@njit(cache=True, nogil=True)
def _decide(mode, allowed, rank, q, i, ptr, nbr, nedge, heads):
    best_j = -1
    best_k = -1
    best_key = 0
    for p in range(ptr[i], ptr[i + 1]):
        j = nbr[p]
        k = nedge[p]
        if q[j] == 0 or allowed[k] == 0:
            continue
        if mode == ML:
            key = -q[j]
        elif mode == PRIO:
            key = rank[k]
        else:
            key = heads[j]
        # strict comparison keeps the lowest class index on ties
        if best_j < 0 or key < best_key:
            best_j = j
            best_k = k
            best_key = key
    return best_j, best_k


@njit(cache=True, nogil=True)
def run(
    arrivals, n, m, ptr, nbr, nedge,
    leaf_mode, leaf_allowed, leaf_rank,
    sel_type, sel_k, sel_watch, sel_a, sel_b,
    n_regimes, gamma, policy_u,
    n_batches, mask_bits, hist_cap, record_every,
):
    T = arrivals.shape[0]
    q = np.zeros(n, np.int64)
    L = np.zeros(n, np.int64)
    M = np.zeros(m, np.int64)
    batch_M = np.zeros((n_batches, m), np.int64)
    batch_len = np.zeros(n_batches, np.int64)
    n_masks = 1 << mask_bits if mask_bits > 0 else 1
    batch_masks = np.zeros((n_batches, n_masks), np.int64)
    hist = np.zeros((n, hist_cap + 1), np.int64)
    n_rec = T // record_every if record_every > 0 else 0
    rec_q = np.zeros((n_rec, n), np.int64)
    rec_l = np.zeros((n_rec, n), np.int64)
    rec_m = np.zeros((n_rec, m), np.int64)
    track_fifo = False
    for leaf in range(leaf_mode.shape[0]):
        if leaf_mode[leaf] == FCFM:
            track_fifo = True
    cap = 64
    buf = np.zeros((n, cap), np.int64)
    head = np.zeros(n, np.int64)
    heads = np.zeros(n, np.int64)
    total = 0
    mask = 0
    regime = 0
    draws = 0
    b = 0
    next_cut = (T + n_batches - 1) // n_batches if n_batches > 0 else T
    for t in range(T):
        while t >= next_cut:
            b += 1
            next_cut = ((b + 1) * T + n_batches - 1) // n_batches
        batch_len[b] += 1
        if mask_bits > 0:
            batch_masks[b, mask] += 1
        if hist_cap > 0:
            for c in range(n):
                v = q[c]
                hist[c, v if v < hist_cap else hist_cap] += 1
        i = arrivals[t]
        L[i] += 1
        if n_regimes > 1 and total == 0:
            regime = 0 if policy_u[draws] < gamma else 1
            draws += 1
        st = sel_type[regime]
        leaf = sel_a[regime]
        if st == SEMIFILTER:
            longest = 0
            for c in range(n):
                if q[c] > longest:
                    longest = q[c]
            if longest >= sel_k[regime]:
                leaf = sel_b[regime]
        elif st == THRESHOLD:
            if q[sel_watch[regime]] >= sel_k[regime]:
                leaf = sel_b[regime]
        j, k = _decide(leaf_mode[leaf], leaf_allowed[leaf], leaf_rank[leaf], q, i,
                       ptr, nbr, nedge, heads)
        if j < 0:
            if track_fifo:
                if q[i] == cap:
                    new = np.zeros((n, 2 * cap), np.int64)
                    for c in range(n):
                        for s in range(q[c]):
                            new[c, s] = buf[c, (head[c] + s) % cap]
                        head[c] = 0
                    buf = new
                    cap = 2 * cap
                buf[i, (head[i] + q[i]) % cap] = t
                if q[i] == 0:
                    heads[i] = t
            q[i] += 1
            total += 1
            if mask_bits > 0 and q[i] == 1:
                mask |= 1 << i
        else:
            q[j] -= 1
            total -= 1
            M[k] += 1
            batch_M[b, k] += 1
            if mask_bits > 0 and q[j] == 0:
                mask &= ~(1 << j)
            if track_fifo:
                head[j] = (head[j] + 1) % cap
                if q[j] > 0:
                    heads[j] = buf[j, head[j]]
        if record_every > 0 and (t + 1) % record_every == 0:
            r = (t + 1) // record_every - 1
            for c in range(n):
                rec_q[r, c] = q[c]
                rec_l[r, c] = L[c]
            for e in range(m):
                rec_m[r, e] = M[e]
    return q, L, M, batch_M, batch_len, batch_masks, hist, rec_q, rec_l, rec_m, draws
