import csv
import json
from fractions import Fraction as F

import pytest

from matchlab.errors import ValidationError
from matchlab.experiments import (
    BUNDLES, beta_sweep, codomino_baseline, coupling_check_diamond, diamond_minus, diamond_plus,
    policy_sweep, run_bundle, sweep, write_bundle,
)
from matchlab.generators import codomino, diamond
from matchlab.policies import parse_policy


@pytest.mark.parametrize("policy", [parse_policy("ml", diamond()), parse_policy("fcfm", diamond()),
                                    diamond_minus()])
def test_coupling_holds_for_greedy_policies(policy):
    rep = coupling_check_diamond([1, 3, 3, 1], policy, 5000, seed=2)
    assert rep.ok and rep.first_violation == {}


def test_coupling_flags_a_non_greedy_policy():
    pol = parse_policy("filter(ml;edges=1-3,2-4,2-3)", diamond())
    rep = coupling_check_diamond([1, 3, 3, 1], pol, 2000, seed=2)
    assert not rep.ok and rep.first_violation


def test_coupling_strictness_is_counted():
    rep = coupling_check_diamond([1, 3, 3, 1], diamond_minus(), 5000, seed=2)
    assert rep.strict_steps["1-3>="] > 0


def test_sweep_is_independent_of_thread_count():
    g = diamond()
    pts = policy_sweep(g, (1, 2, 2, 1), "semifilter(k={k};support=1-2,2-3,3-4)", "k", [0, 2, 5],
                       support=frozenset({0, 2, 4}))
    one = sweep(pts, 3000, seeds=(0, 1), threads=1)
    four = sweep(pts, 3000, seeds=(0, 1), threads=4)
    assert one == four
    assert [(r["value"], r["seed"]) for r in one] == [(0, 0), (0, 1), (2, 0), (2, 1), (5, 0), (5, 1)]
    assert "leak" in one[0]


def test_common_random_numbers_across_points():
    pts = beta_sweep("ml", ["1/4", "1/2"])
    rows = sweep(pts, 2000, seeds=(3,))
    assert pts[0].rates == (F(1, 4), F(1, 2), F(1, 2), F(1, 4))
    assert "alpha_1" in rows[0] and rows[0]["seed"] == rows[1]["seed"] == 3


@pytest.mark.parametrize(
    "template, variable, message",
    [("ml", "k", "must contain"), ("ml", "beta", "k or gamma")],
)
def test_policy_sweep_validation(template, variable, message):
    with pytest.raises(ValidationError, match=message):
        policy_sweep(diamond(), (1, 2, 2, 1), template, variable, [1])


def test_gamma_sweep_parses_fractions():
    pts = policy_sweep(diamond(), (1, 2, 2, 1), "mix(ml,fcfm;gamma={gamma})", "gamma",
                       ["0", "1/2", "1"])
    assert [p.policy.gamma for p in pts] == [0, F(1, 2), 1]


def test_codomino_baseline_is_total():
    g = codomino()
    assert sorted(codomino_baseline(g).order) == list(range(g.m))


@pytest.mark.parametrize("name, values", [("diamond-beta", ["1/2"]), ("fish-k", [2]),
                                          ("diamond-leak", [4]), ("codomino-leak", [4])])
def test_small_bundles(tmp_path, name, values):
    csv_path, man_path = write_bundle(name, tmp_path, T=2000, seed=1, values=values)
    rows = list(csv.DictReader(csv_path.open()))
    man = json.loads(man_path.read_text())
    assert len(rows) == len(values)
    assert man["bundle"] == name and man["T"] == 2000 and man["columns"] == list(rows[0])
    assert run_bundle(name, T=2000, seed=1, values=values)[0].keys() == rows[0].keys()


def test_bundle_registry():
    assert set(BUNDLES) == {"diamond-beta", "fish-k", "diamond-leak", "codomino-leak"}
    with pytest.raises(ValidationError, match="unknown bundle"):
        run_bundle("nope")


def test_diamond_plus_priorities():
    g = diamond()
    assert diamond_plus(g).order[:2] == (0, 4)
    assert diamond_minus(g).order[:2] == (1, 3)
