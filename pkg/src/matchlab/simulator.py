"""
Discrete-time simulation of the matching model (G, lambda, Phi).

Item ``t`` arrives with class ``I_t``; it is matched right away according to
the policy or joins its class queue. State statistics (queue histograms,
empty and sole-occupancy frequencies) are sampled just before each arrival,
so they estimate the stationary law of the jump chain. Rate estimates use
``mu_k ~ (sum lambda) M_{T,k} / T`` over the full path; standard errors come
from batch means over 100 contiguous batches.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _engine, reference
from .conservation import as_rates
from .errors import ValidationError
from .policies import Unsupported, compile_policy, policy_edges_valid, uses_randomness

N_BATCHES = 100
HIST_CAP = 10**4
MASK_BITS_MAX = 16
_CHUNK = 1 << 20


def streams(seed):
    """Independent arrival and policy generators derived from one seed."""
    arr, pol = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.Philox(arr)), np.random.Generator(np.random.Philox(pol))


def class_thresholds(rates):
    """Cumulative arrival probabilities, computed exactly then rounded once."""
    total = sum(rates, Fraction(0))
    acc, out = Fraction(0), []
    for r in rates:
        acc += r
        out.append(float(acc / total))
    return np.array(out)


def sample_arrivals(rates, T, seed):
    """
    Class sequence ``I_0, ..., I_{T-1}`` (0-based) for ``seed``.

    Class i is drawn when ``c_{i-1} < u <= c_i`` on the cumulative
    probabilities, so a uniform landing on a boundary goes to the lower class.

    >>> sample_arrivals([1, 1], 8, seed=3).tolist() == sample_arrivals([1, 1], 8, seed=3).tolist()
    True
    """
    rates = [Fraction(r) for r in rates]
    cum = class_thresholds(rates)
    gen, _ = streams(seed)
    dtype = np.int8 if len(rates) <= 127 else np.int16
    out = np.empty(T, dtype)
    for start in range(0, T, _CHUNK):
        stop = min(T, start + _CHUNK)
        idx = np.searchsorted(cum, gen.random(stop - start), side="left")
        out[start:stop] = np.minimum(idx, len(rates) - 1)
    return out


def policy_uniforms(seed, size):
    _, gen = streams(seed)
    return gen.random(size)


def _csr(g):
    ptr = np.zeros(g.n + 1, np.int64)
    nbr, ned = [], []
    for i in range(g.n):
        pairs = []
        for k in g.incident[i]:
            a, b = g.edges[k]
            pairs.append((b if a == i else a, k))
        pairs.sort()
        nbr += [j for j, _ in pairs]
        ned += [k for _, k in pairs]
        ptr[i + 1] = len(nbr)
    return ptr, np.array(nbr, np.int64), np.array(ned, np.int64)


def _batch_se(values):
    """Standard error of the mean of per-batch estimates (rows = batches)."""
    values = np.asarray(values, float)
    if values.shape[0] < 2:
        return np.full(values.shape[1:], np.nan)
    return values.std(axis=0, ddof=1) / np.sqrt(values.shape[0])


@dataclass
class Checkpoints:
    """Pathwise counters after arrivals ``t = every, 2 every, ...``."""

    t: np.ndarray
    L: np.ndarray
    M: np.ndarray
    Q: np.ndarray


@dataclass
class SimulationResult:
    """
    Counters and estimators of one run. Arrays are indexed by 0-based class
    or canonical edge index.
    """

    graph: object = field(repr=False)
    rates: tuple
    policy: object
    seed: int
    T: int
    L: np.ndarray
    M: np.ndarray
    Q_final: np.ndarray
    batch_M: np.ndarray = field(repr=False)
    batch_len: np.ndarray = field(repr=False)
    batch_masks: np.ndarray = field(repr=False)
    histograms: np.ndarray = field(repr=False)
    checkpoints: Checkpoints = field(repr=False)
    policy_draws: int = 0
    engine: str = "numba"

    @property
    def total_rate(self):
        return float(sum(self.rates))

    @property
    def rate_estimates(self):
        """``mu_k = (sum lambda) M_{T,k} / T``."""
        return self.total_rate * self.M / self.T

    def _batch_rates(self):
        return self.total_rate * self.batch_M / self.batch_len[:, None]

    @property
    def rate_se(self):
        return _batch_se(self._batch_rates())

    def _require_masks(self):
        if self.batch_masks.shape[1] == 1:
            raise ValidationError("occupancy statistics need n <= 16 classes")

    def occupancy_frequency(self, accept):
        """
        Fraction of pre-arrival states whose set of non-empty classes
        (a bit mask) satisfies ``accept``; returns ``(estimate, se)``.
        """
        self._require_masks()
        masks = np.arange(self.batch_masks.shape[1])
        sel = np.array([bool(accept(int(x))) for x in masks])
        counts = self.batch_masks[:, sel].sum(axis=1)
        est = counts.sum() / self.T
        return float(est), float(_batch_se((counts / self.batch_len)[:, None])[0])

    def empty_frequency(self):
        """``p_empty``: fraction of arrivals that find the system empty."""
        return self.occupancy_frequency(lambda x: x == 0)

    def sole_frequency(self, i):
        """``p_i``: only class ``i`` (0-based) has waiting items."""
        return self.occupancy_frequency(lambda x: x == 1 << i)

    def within_frequency(self, classes):
        """Some item waits and every waiting class lies in ``classes``."""
        allowed = sum(1 << c for c in classes)
        return self.occupancy_frequency(lambda x: x != 0 and x & ~allowed == 0)

    def alpha(self, basis):
        """
        Kernel coordinates ``B^+ (mu - mu0)`` of the rate estimate with
        batch-means standard errors.
        """
        pinv = np.array([[float(x) for x in row] for row in basis.pseudo_inverse()])
        mu0 = np.array([float(x) for x in basis.origin])
        est = pinv @ (self.rate_estimates - mu0)
        batches = (self._batch_rates() - mu0) @ pinv.T
        return est, _batch_se(batches)

    def leak(self, support):
        """Total estimated rate on edges outside ``support``, with its SE."""
        out = [k for k in range(self.graph.m) if k not in set(support)]
        est = float(self.rate_estimates[out].sum())
        se = float(_batch_se(self._batch_rates()[:, out].sum(axis=1)[:, None])[0])
        return est, se

    def conservation_holds(self):
        """``L_i = Q_i + sum_{k in E_i} M_k`` at every checkpoint and at the end."""
        def ok(L, M, Q):
            for i in range(self.graph.n):
                if L[..., i].tolist() != (Q[..., i] + sum(M[..., k] for k in self.graph.incident[i])).tolist():
                    return False
            return bool((Q >= 0).all())

        c = self.checkpoints
        return ok(self.L, self.M, self.Q_final) and ok(c.L, c.M, c.Q)


def simulate(g, rates, policy, T, seed=0, record_every=0, arrivals=None, engine="auto",
             histograms=True):
    """
    Simulate ``T`` arrivals.

    Parameters
    ----------
    g: :class:`~matchlab.graph.MatchingGraph`
    rates: sequence
        Arrival rates (only their proportions matter to the path).
    policy: policy object from :mod:`matchlab.policies`
    T: int
        Number of arrivals.
    seed: int
        Seeds both the arrival stream and the policy stream.
    record_every: int
        Record ``(L, M, Q)`` after every ``record_every`` arrivals (0: never).
    arrivals: array, optional
        Pre-sampled class sequence shared between coupled runs.
    engine: {"auto", "numba", "reference"}
        ``auto`` uses the compiled kernel when the policy compiles.

    Examples
    --------

    >>> from matchlab.generators import diamond
    >>> from matchlab.policies import MatchLongest
    >>> r = simulate(diamond(), [1, 2, 2, 1], MatchLongest(), T=1, seed=0)
    >>> int(r.Q_final.sum()), int(r.M.sum())
    (1, 0)
    """
    lam = as_rates(g, rates)
    if T < 1:
        raise ValidationError("T must be at least 1")
    if record_every < 0:
        raise ValidationError("record_every must be non-negative")
    if engine not in ("auto", "numba", "reference"):
        raise ValidationError(f"unknown engine {engine!r}")
    policy_edges_valid(policy, g)
    if arrivals is None:
        arrivals = sample_arrivals(lam, T, seed)
    elif len(arrivals) != T:
        raise ValidationError("arrival sequence length differs from T")
    policy_u = policy_uniforms(seed, T) if uses_randomness(policy) else np.zeros(1)
    n_batches = min(N_BATCHES, T)
    mask_bits = g.n if g.n <= MASK_BITS_MAX else 0
    hist_cap = HIST_CAP if histograms else 0
    compiled = None
    if engine != "reference":
        try:
            compiled = compile_policy(policy, g)
        except Unsupported:
            if engine == "numba":
                raise ValidationError("policy nesting not supported by the compiled engine") from None
    if compiled is not None:
        ptr, nbr, ned = _csr(g)
        out = _engine.run(
            np.asarray(arrivals), g.n, g.m, ptr, nbr, ned,
            compiled.leaf_mode, compiled.leaf_allowed, compiled.leaf_rank,
            compiled.sel_type, compiled.sel_k, compiled.sel_watch, compiled.sel_a,
            compiled.sel_b, compiled.n_regimes, compiled.gamma, policy_u,
            n_batches, mask_bits, hist_cap, record_every,
        )
        used = "numba"
    else:
        out = reference.run(arrivals, g, policy, policy_u, n_batches, mask_bits, hist_cap,
                            record_every)
        used = "reference"
    q, L, M, batch_M, batch_len, batch_masks, hist, rec_q, rec_l, rec_m, draws = out
    ts = np.arange(1, len(rec_q) + 1, dtype=np.int64) * record_every
    return SimulationResult(
        graph=g, rates=lam, policy=policy, seed=seed, T=T, L=L, M=M, Q_final=q,
        batch_M=batch_M, batch_len=batch_len, batch_masks=batch_masks, histograms=hist,
        checkpoints=Checkpoints(ts, rec_l, rec_m, rec_q), policy_draws=int(draws), engine=used,
    )
