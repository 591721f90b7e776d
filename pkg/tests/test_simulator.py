from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matchlab.errors import ValidationError
from matchlab.experiments import diamond_minus, diamond_plus, fish_threshold
from matchlab.generators import codomino, complete_graph, diamond, fish
from matchlab.policies import (
    FCFM, EdgePriority, Filter, MatchLongest, Mixture, SemiFilter, ThresholdPriority,
)
from matchlab.simulator import class_thresholds, sample_arrivals, simulate

from .strategies import rates_for, surjective_graphs

D = diamond()
FIELDS = ("L", "M", "Q_final", "batch_M", "batch_len", "batch_masks", "histograms")


def _same_run(a, b):
    for name in FIELDS:
        assert np.array_equal(getattr(a, name), getattr(b, name)), name
    for name in ("t", "L", "M", "Q"):
        assert np.array_equal(getattr(a.checkpoints, name), getattr(b.checkpoints, name)), name
    assert a.policy_draws == b.policy_draws


@pytest.mark.parametrize(
    "g, rates, policy",
    [
        (D, [1, 2, 2, 1], MatchLongest()),
        (D, [1, 2, 2, 1], FCFM()),
        (D, [1, 2, 2, 1], diamond_plus(D)),
        (D, [1, 2, 2, 1], Filter(MatchLongest(), frozenset({0, 2, 4}))),
        (D, [1, 2, 2, 1], SemiFilter(4, frozenset({0, 2, 4}))),
        (D, [1, 2, 2, 1], Mixture(diamond_plus(D), diamond_minus(D), F(1, 3))),
        (D, [1, 2, 2, 1], Filter(Mixture(FCFM(), MatchLongest(), F(1, 2)), frozenset({0, 2, 4}))),
        (fish(), [4, 4, 3, 2, 3, 2], fish_threshold(3, 1)),
        (fish(), [4, 4, 3, 2, 3, 2], fish_threshold(3, -1)),
        (codomino(), [2, 4, 4, 2, 2, 2], SemiFilter(2, frozenset({1, 2, 6}))),
        (codomino(), [2, 4, 4, 2, 2, 2], Mixture(FCFM(), SemiFilter(3, frozenset({1, 2, 6})),
                                                 F(1, 2))),
    ],
)
def test_compiled_kernel_matches_reference(g, rates, policy):
    kw = dict(T=4000, seed=11, record_every=97)
    a = simulate(g, rates, policy, engine="numba", **kw)
    b = simulate(g, rates, policy, engine="reference", **kw)
    assert a.engine == "numba" and b.engine == "reference"
    _same_run(a, b)
    assert a.conservation_holds()


def _policies(g):
    m = g.m
    orders = st.permutations(range(m)).map(tuple)
    subsets = st.frozensets(st.integers(0, m - 1), min_size=1)
    leaf = st.one_of(st.just(MatchLongest()), st.just(FCFM()), orders.map(EdgePriority))
    regime = st.one_of(
        leaf,
        st.builds(Filter, leaf, subsets),
        st.builds(SemiFilter, st.integers(0, 4), subsets),
        st.builds(ThresholdPriority, st.integers(0, 4), st.integers(0, g.n - 1), orders, orders),
    )
    gammas = st.fractions(0, 1, max_denominator=4)
    return st.one_of(regime, st.builds(Mixture, regime, regime, gammas))


@settings(max_examples=40)
@given(surjective_graphs(max_nodes=7), st.data(), st.integers(0, 2**32))
def test_kernel_matches_reference_on_random_problems(g, data, seed):
    rates = data.draw(rates_for(g, high=6))
    policy = data.draw(_policies(g))
    kw = dict(T=600, seed=seed, record_every=50)
    _same_run(simulate(g, rates, policy, engine="numba", **kw),
              simulate(g, rates, policy, engine="reference", **kw))


def test_single_arrival_queues():
    r = simulate(D, [1, 2, 2, 1], MatchLongest(), T=1)
    assert r.Q_final.sum() == 1 and r.M.sum() == 0 and r.L.sum() == 1


def test_semifilter_with_zero_threshold_is_match_longest():
    kw = dict(T=5000, seed=4, record_every=1)
    a = simulate(D, [1, 2, 2, 1], SemiFilter(0, frozenset({0, 2, 4})), **kw)
    b = simulate(D, [1, 2, 2, 1], MatchLongest(), **kw)
    assert np.array_equal(a.checkpoints.Q, b.checkpoints.Q)


@pytest.mark.parametrize("gamma, branch", [(F(1), 0), (F(0), 1)])
def test_degenerate_mixture_follows_one_branch(gamma, branch):
    first, second = diamond_plus(D), diamond_minus(D)
    kw = dict(T=5000, seed=9, record_every=1)
    mix = simulate(D, [1, 2, 2, 1], Mixture(first, second, gamma), **kw)
    ref = simulate(D, [1, 2, 2, 1], (first, second)[branch], **kw)
    assert np.array_equal(mix.checkpoints.Q, ref.checkpoints.Q)
    assert np.array_equal(mix.M, ref.M)


def test_mixture_draws_once_per_empty_visit():
    r = simulate(D, [1, 2, 2, 1], Mixture(diamond_plus(D), diamond_minus(D), F(1, 2)), T=20000)
    assert r.policy_draws == r.batch_masks[:, 0].sum()


def test_complete_graph_greedy_paths_coincide():
    g = complete_graph(4)
    arr = sample_arrivals([3, 3, 3, 3], 20000, seed=5)
    runs = [simulate(g, [3] * 4, p, T=20000, arrivals=arr, record_every=1)
            for p in (MatchLongest(), FCFM(), EdgePriority((5, 4, 3, 2, 1, 0)))]
    for r in runs[1:]:
        assert np.array_equal(r.checkpoints.Q, runs[0].checkpoints.Q)


def test_greedy_states_have_no_compatible_pair():
    r = simulate(D, [1, 2, 2, 1], FCFM(), T=3000, record_every=1)
    q = r.checkpoints.Q
    for i, j in D.edges:
        assert not (q[:, i] * q[:, j]).any()


def test_determinism_and_seed_sensitivity():
    a = simulate(D, [1, 2, 2, 1], MatchLongest(), T=3000, seed=1)
    b = simulate(D, [1, 2, 2, 1], MatchLongest(), T=3000, seed=1)
    c = simulate(D, [1, 2, 2, 1], MatchLongest(), T=3000, seed=2)
    _same_run(a, b)
    assert not np.array_equal(a.L, c.L) or not np.array_equal(a.M, c.M)


def test_arrival_frequencies():
    rates = [1, 2, 3, 4]
    T = 200000
    counts = np.bincount(sample_arrivals(rates, T, seed=0), minlength=4)
    p = np.array(rates) / 10
    z = (counts - T * p) / np.sqrt(T * p * (1 - p))
    assert np.abs(z).max() < 5


def test_boundary_uniform_goes_to_lower_class():
    cum = class_thresholds([F(1), F(1)])
    assert cum.tolist() == [0.5, 1.0]
    assert np.searchsorted(cum, [0.5, 0.5000001], side="left").tolist() == [0, 1]


def test_arrivals_prefix_stable_across_lengths():
    short = sample_arrivals([1, 2, 3], 1000, seed=8)
    long = sample_arrivals([1, 2, 3], 5000, seed=8)
    assert np.array_equal(short, long[:1000])


def test_occupancy_statistics_are_consistent():
    r = simulate(D, [1, 2, 2, 1], MatchLongest(), T=50000, seed=3)
    pe, _ = r.empty_frequency()
    # greedy diamond states: empty, class 2 or 3 alone, or a subset of {1, 4}
    parts = [r.within_frequency([0, 3])[0], r.sole_frequency(1)[0], r.sole_frequency(2)[0]]
    assert pe + sum(parts) == pytest.approx(1)
    assert r.sole_frequency(1) == r.within_frequency([1])
    assert r.histograms.sum(axis=1).tolist() == [50000] * 4


def test_rate_estimates_and_errors():
    r = simulate(D, [1, 2, 2, 1], MatchLongest(), T=100000, seed=3)
    assert r.rate_estimates.sum() == pytest.approx(6 * r.M.sum() / r.T)
    assert np.all(r.rate_se > 0)
    est, se = r.leak({0, 2, 4})
    assert est == pytest.approx(r.rate_estimates[[1, 3]].sum()) and se > 0


@pytest.mark.parametrize(
    "kwargs, message",
    [
        (dict(T=0), "at least 1"),
        (dict(T=5, engine="gpu"), "unknown engine"),
        (dict(T=5, arrivals=np.zeros(4, np.int8)), "length"),
        (dict(T=5, record_every=-1), "non-negative"),
    ],
)
def test_validation(kwargs, message):
    with pytest.raises(ValidationError, match=message):
        simulate(D, [1, 2, 2, 1], MatchLongest(), **kwargs)


def test_nested_mixture_falls_back_to_reference():
    inner = Mixture(MatchLongest(), FCFM(), F(1, 2))
    pol = Mixture(inner, diamond_plus(D), F(1, 2))
    assert simulate(D, [1, 2, 2, 1], pol, T=200).engine == "reference"
    with pytest.raises(ValidationError, match="compiled engine"):
        simulate(D, [1, 2, 2, 1], pol, T=200, engine="numba")


def test_occupancy_needs_small_graph():
    from matchlab.generators import cycle_graph

    r = simulate(cycle_graph(17), [1] * 17, MatchLongest(), T=100, histograms=False)
    with pytest.raises(ValidationError, match="16"):
        r.empty_frequency()
