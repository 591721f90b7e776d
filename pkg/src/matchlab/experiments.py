"""
Experiment orchestration: the diamond coupling check, parameter sweeps and
the named data bundles (CSV plus a JSON manifest).
"""

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    analytic_greedy_diamond, diamond_alpha_range, diamond_basis, diamond_rates, fish_basis,
)
from .errors import ValidationError
from .generators import codomino, diamond, fish, triangle
from .policies import edge_priority, parse_policy, semi_filter_policy, threshold_priority_policy
from .simulator import sample_arrivals, simulate

DIAMOND_PLUS = ("1-2", "3-4")
DIAMOND_MINUS = ("1-3", "2-4")
DIAMOND_LEAK_RATES = (Fraction(1, 4), Fraction(3, 8), Fraction(3, 8), Fraction(1, 4))
DIAMOND_LEAK_SUPPORT = ("1-2", "2-3", "3-4")
CODOMINO_LEAK_RATES = (2, 4, 4, 2, 2, 2)
CODOMINO_LEAK_SUPPORT = ("1-6", "2-3", "4-5")
FISH_RATES = (4, 4, 3, 2, 3, 2)


def diamond_plus(g=None):
    """Greedy edge priority with edges 1-2 and 3-4 first."""
    return edge_priority(g or diamond(), DIAMOND_PLUS)


def diamond_minus(g=None):
    """Greedy edge priority with edges 1-3 and 2-4 first."""
    return edge_priority(g or diamond(), DIAMOND_MINUS)


def fish_threshold(k, sign=+1):
    """
    Threshold family on the fish. ``sign=+1`` watches class 4 and favours
    edge 3-4 beyond the threshold; ``sign=-1`` is the mirror image with
    classes 4 and 6 swapped.
    """
    g = fish()
    if sign > 0:
        watch, low, high = 3, ["1-3", "2-3", "3-4", "5-6"], ["3-4", "2-3", "1-3", "5-6"]
    else:
        watch, low, high = 5, ["1-3", "2-3", "3-6", "4-5"], ["3-6", "2-3", "1-3", "4-5"]
    order = lambda labels: [g.edge_index(*(int(x) - 1 for x in s.split("-"))) for s in labels]
    return threshold_priority_policy(g, k, watch, order(low), order(high))


def support_edges(g, labels):
    return frozenset(g.edge_index(*(int(x) - 1 for x in s.split("-"))) for s in labels)


# -- coupling ----------------------------------------------------------------

_PROJECTION = np.array([0, 1, 2, 0])


@dataclass
class CouplingReport:
    """
    ``first_violation`` maps each failed identity to the first step ``t``
    (1-based arrival count) where it fails. ``strict_steps`` counts steps
    where each inequality is strict.
    """

    T: int
    seed: int
    projection_ok: bool
    inequalities_ok: dict
    first_violation: dict = field(default_factory=dict)
    strict_steps: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.projection_ok and all(self.inequalities_ok.values())


def coupling_check_diamond(rates, policy, T, seed=0):
    """
    Couple ``policy`` and the 1-2/3-4 priority policy on one arrival stream
    and compare both with greedy matching on the triangle fed by the
    merged stream (classes 1 and 4 lumped).

    >>> from matchlab.policies import MatchLongest
    >>> coupling_check_diamond([1, 2, 2, 1], MatchLongest(), 2000, seed=1).ok
    True
    """
    g = diamond()
    arrivals = sample_arrivals(rates, T, seed)
    run = simulate(g, rates, policy, T, seed, record_every=1, arrivals=arrivals, histograms=False)
    plus = simulate(g, rates, diamond_plus(g), T, seed, record_every=1, arrivals=arrivals,
                    histograms=False)
    tri_rates = (rates[0] + rates[3], rates[1], rates[2])
    tri = simulate(triangle(), tri_rates, parse_policy("ml", triangle()), T, seed,
                   record_every=1, arrivals=_PROJECTION[arrivals].astype(arrivals.dtype),
                   histograms=False)
    qt = tri.checkpoints.Q
    first, ok = {}, True
    for name, r in (("policy", run), ("plus", plus)):
        q = r.checkpoints.Q
        proj = np.stack([q[:, 0] + q[:, 3], q[:, 1], q[:, 2]], axis=1)
        bad = np.nonzero((proj != qt).any(axis=1))[0]
        if bad.size:
            ok = False
            first[f"projection-{name}"] = int(bad[0]) + 1
    m, mp = run.checkpoints.M, plus.checkpoints.M
    checks = {"1-2<=": (0, -1), "3-4<=": (4, -1), "1-3>=": (1, +1), "2-4>=": (3, +1)}
    ineq, strict = {}, {}
    for name, (k, sgn) in checks.items():
        diff = sgn * (m[:, k] - mp[:, k])
        bad = np.nonzero(diff < 0)[0]
        ineq[name] = not bad.size
        strict[name] = int((diff > 0).sum())
        if bad.size:
            first[name] = int(bad[0]) + 1
    return CouplingReport(T, seed, ok, ineq, first, strict)


# -- sweeps -------------------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    value: object
    graph: object
    rates: tuple
    policy: object
    basis: object = None
    support: frozenset = None


def run_point(point, T, seed):
    """One simulation summarised as a flat row."""
    r = simulate(point.graph, point.rates, point.policy, T, seed, histograms=False)
    row = {"value": _fmt_value(point.value), "seed": seed, "T": T,
           "policy": point.policy.label(point.graph)}
    se = r.rate_se
    for k, lab in enumerate(point.graph.edge_labels):
        row[f"mu_{lab}"] = float(r.rate_estimates[k])
        row[f"se_{lab}"] = float(se[k])
    if point.basis is not None:
        a, ase = r.alpha(point.basis)
        for j in range(len(a)):
            row[f"alpha_{j + 1}"] = float(a[j])
            row[f"alpha_se_{j + 1}"] = float(ase[j])
    if point.support is not None:
        row["leak"], row["leak_se"] = r.leak(point.support)
    return row


def _fmt_value(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


def sweep(points, T, seeds=(0,), threads=1):
    """
    Run every point for every seed; rows come back in (point, seed) order
    whatever the thread count.
    """
    jobs = [(p, s) for p in points for s in seeds]
    if threads <= 1:
        return [run_point(p, T, s) for p, s in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: run_point(job[0], T, job[1]), jobs))


def policy_sweep(g, rates, template, variable, values, basis=None, support=None):
    """Points for a policy template such as ``"semifilter(k={k};support=1-2)"``."""
    if variable not in ("k", "gamma"):
        raise ValidationError("policy sweeps vary k or gamma")
    if "{" + variable + "}" not in template:
        raise ValidationError(f"template must contain {{{variable}}}")
    return [SweepPoint(v, g, tuple(rates), parse_policy(template.replace("{" + variable + "}", str(v)), g),
                       basis, support) for v in values]


def beta_sweep(template, values):
    """Diamond points with rates ``(1/4, 1/4 + beta, 1/4 + beta, 1/4)``."""
    g = diamond()
    policy = parse_policy(template, g)
    out = []
    for v in values:
        lam = diamond_rates(Fraction(v))
        out.append(SweepPoint(Fraction(v), g, lam, policy, diamond_basis(lam)))
    return out


# -- bundles ------------------------------------------------------------------

BUNDLE_DEFAULTS = {
    "diamond-beta": ["1/8", "1/4", "1/2", "1", "2", "4", "8"],
    "fish-k": [1, 2, 4, 8, 16, 32, 64, 128, 256, 512],
    "diamond-leak": [1, 2, 4, 8, 16, 32, 64],
    "codomino-leak": [1, 2, 4, 8, 16, 32, 64],
}


def _diamond_beta(values, T, seed, threads):
    g = diamond()
    pols = [("plus", diamond_plus(g)), ("minus", diamond_minus(g)), ("ml", parse_policy("ml", g))]
    points = []
    for v in values:
        lam = diamond_rates(Fraction(v))
        kb = diamond_basis(lam)
        points += [SweepPoint(Fraction(v), g, lam, p, kb) for _, p in pols]
    rows = sweep(points, T, (seed,), threads)
    out = []
    for t, v in enumerate(values):
        lam = diamond_rates(Fraction(v))
        lo, hi = diamond_alpha_range(lam)
        an = analytic_greedy_diamond(lam)
        mu0 = diamond_basis(lam).origin
        row = {"beta": str(Fraction(v))}
        for s, (name, _) in enumerate(pols):
            r = rows[3 * t + s]
            row[f"alpha_{name}"] = r["alpha_1"]
            row[f"alpha_{name}_se"] = r["alpha_se_1"]
        row["alpha_min"] = float(lo)
        row["alpha_max"] = float(hi)
        row["greedy_alpha_lower"] = float(an.mu_lower["1-2"] - mu0[0])
        row["greedy_alpha_upper"] = float(lam[0] - an.mu_lower["1-3"] - mu0[0])
        out.append(row)
    return out


def _fish_k(values, T, seed, threads):
    kb = fish_basis()
    g = fish()
    points = [SweepPoint(int(k), g, FISH_RATES, fish_threshold(int(k), s), kb)
              for k in values for s in (+1, -1)]
    rows = sweep(points, T, (seed,), threads)
    return [{"k": int(k),
             "alpha_plus": rows[2 * t]["alpha_1"], "alpha_plus_se": rows[2 * t]["alpha_se_1"],
             "alpha_minus": rows[2 * t + 1]["alpha_1"],
             "alpha_minus_se": rows[2 * t + 1]["alpha_se_1"]}
            for t, k in enumerate(values)]


def _leak(g, rates, support_labels, baseline_policy, values, T, seed, threads):
    support = support_edges(g, support_labels)
    points = [SweepPoint(int(k), g, tuple(rates), semi_filter_policy(g, int(k), support),
                         support=support) for k in values]
    points.append(SweepPoint("baseline", g, tuple(rates), baseline_policy, support=support))
    rows = sweep(points, T, (seed,), threads)
    base = rows[-1]
    return [{"k": int(k), "leak": r["leak"], "leak_se": r["leak_se"],
             "greedy_baseline": base["leak"], "greedy_baseline_se": base["leak_se"]}
            for k, r in zip(values, rows[:-1])]


def _diamond_leak(values, T, seed, threads):
    g = diamond()
    return _leak(g, DIAMOND_LEAK_RATES, DIAMOND_LEAK_SUPPORT, diamond_plus(g), values, T, seed,
                 threads)


def codomino_baseline(g=None):
    """Greedy priority favouring the vertex edges 1-6, 2-3, 4-5; 2-6 and 3-5 last."""
    g = g or codomino()
    return edge_priority(g, ["1-6", "2-3", "4-5", "1-2", "3-4", "5-6", "2-6", "3-5"])


def _codomino_leak(values, T, seed, threads):
    g = codomino()
    return _leak(g, CODOMINO_LEAK_RATES, CODOMINO_LEAK_SUPPORT, codomino_baseline(g), values, T,
                 seed, threads)


BUNDLES = {
    "diamond-beta": _diamond_beta,
    "fish-k": _fish_k,
    "diamond-leak": _diamond_leak,
    "codomino-leak": _codomino_leak,
}


def run_bundle(name, T=10**6, seed=0, values=None, threads=1):
    """Rows of the named bundle; ``values`` overrides its parameter grid."""
    if name not in BUNDLES:
        raise ValidationError(f"unknown bundle {name!r}; choose from {sorted(BUNDLES)}")
    values = list(values) if values is not None else BUNDLE_DEFAULTS[name]
    return BUNDLES[name](values, T, seed, threads)


def write_csv(rows, path):
    path = Path(path)
    with path.open("w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for row in rows:
            w.writerow({k: _cell(v) for k, v in row.items()})


def _cell(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return v


def write_bundle(name, out_dir, T=10**6, seed=0, values=None, threads=1):
    """Write ``<name>.csv`` and ``<name>.manifest.json``; returns both paths."""
    rows = run_bundle(name, T, seed, values, threads)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    write_csv(rows, csv_path)
    manifest = {
        "bundle": name, "version": __version__, "T": T, "seed": seed,
        "values": [str(v) for v in (values or BUNDLE_DEFAULTS[name])],
        "columns": list(rows[0]) if rows else [],
    }
    man_path = out_dir / f"{name}.manifest.json"
    man_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return csv_path, man_path
