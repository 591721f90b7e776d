"""
``matchlab`` command line.

Exit codes: 0 success, 2 invalid input, 3 infeasible problem or size guard.
"""

import csv
import io
import sys
import time
from pathlib import Path

import click

from . import __version__
from .conservation import (
    is_stabilizable, lyapunov_sufficient_condition, maximin_solution,
    particular_solution_pseudoinverse, solve_bijective,
)
from .errors import InfeasibleError, MatchlabError, ValidationError
from .experiments import BUNDLES, beta_sweep, policy_sweep, sweep, write_bundle
from .generators import NAMED_GRAPHS
from .graph import classify, is_connected
from .kernel import kernel_basis
from .policies import parse_policy
from .polytope import build_polytope, classify_inequalities, enumerate_vertices
from .serialize import dumps, encode, graph_json, load_graph, report
from .simulator import simulate
from ._rational import to_fraction


def _nodes(t):
    return [v + 1 for v in t]


def _graph_arg(spec, rates_opt):
    """A JSON file path, or ``named:<name>`` for a built-in graph."""
    if spec.startswith("named:"):
        name = spec[len("named:"):]
        if name not in NAMED_GRAPHS:
            raise ValidationError(f"unknown named graph {name!r}; choose from {sorted(NAMED_GRAPHS)}")
        g, rates = NAMED_GRAPHS[name](), None
    else:
        g, rates = load_graph(spec)
    if rates_opt:
        try:
            rates = tuple(to_fraction(x) for x in rates_opt.split(","))
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"malformed --rates {rates_opt!r}") from None
    return g, rates


def _need_rates(rates):
    if rates is None:
        raise ValidationError("rates are required (graph file 'rates' key or --rates)")
    return rates


def _emit(ctx, command, payload, rows=None):
    """Write a JSON report, or CSV rows when ``--format csv`` and rows exist."""
    opts = ctx.obj
    if opts["format"] == "csv":
        if rows is None:
            raise ValidationError(f"{command} has no CSV form; use --format json")
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for row in rows:
                w.writerow({k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in row.items()})
        text = buf.getvalue()
    else:
        text = dumps(report(command, payload, time.perf_counter() - opts["start"], __version__))
    if opts["out"]:
        Path(opts["out"]).write_text(text)
    else:
        click.echo(text, nl=False)


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ValidationError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(2)
        except InfeasibleError as exc:
            click.echo(f"infeasible: {exc}", err=True)
            ctx.exit(3)
        except MatchlabError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(2)


@click.group(cls=_Group)
@click.version_option(__version__)
@click.option("--out", type=click.Path(dir_okay=True), default=None,
              help="Output file (bundle: output directory).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--threads", type=click.IntRange(min=1), default=1, help="Worker threads for sweeps.")
@click.option("--seed", type=click.IntRange(min=0), default=0, help="Base random seed.")
@click.pass_context
def main(ctx, out, fmt, threads, seed):
    """Analyze and simulate stochastic matching models.

    GRAPH arguments are JSON files {"n", "edges", "rates"} or named:<name>.
    """
    ctx.obj = {"out": out, "format": fmt, "threads": threads, "seed": seed,
               "start": time.perf_counter()}


_rates_option = click.option("--rates", default=None,
                             help="Comma-separated rates overriding the file, e.g. 1,2,2,1.")


@main.command()
@click.argument("graph")
@_rates_option
@click.pass_context
def analyze(ctx, graph, rates):
    """Classification, nullities and stabilizability."""
    g, lam = _graph_arg(graph, rates)
    cls = classify(g)
    payload = {
        "graph": graph_json(g, lam),
        "kind": cls.kind,
        "nullity_A": cls.nullity_A,
        "nullity_At": cls.nullity_At,
        "components": [{"nodes": _nodes(c.nodes), "edges": c.edge_count,
                        "bipartite": c.is_bipartite} for c in cls.components],
    }
    if lam is not None:
        rep = is_stabilizable(g, lam)
        payload["stabilizable"] = rep.stabilizable
        payload["witness"] = rep.witness
        payload["slack"] = rep.slack
        payload["certificate_kind"] = rep.certificate_kind
        cert = rep.certificate
        if rep.certificate_kind in ("bipartite-component", "independent-set"):
            cert = _nodes(cert)
        payload["certificate"] = cert
        if is_connected(g) and cls.surjective and g.n <= 20:
            payload["greedy_sufficient_condition"] = lyapunov_sufficient_condition(g, lam)
    _emit(ctx, "analyze", payload)


@main.command()
@click.argument("graph")
@_rates_option
@click.option("--method", type=click.Choice(["closed-form", "pseudoinverse", "maximin"]),
              default="maximin")
@click.pass_context
def solve(ctx, graph, rates, method):
    """A solution of the conservation equation."""
    g, lam = _graph_arg(graph, rates)
    lam = _need_rates(lam)
    rep = is_stabilizable(g, lam)
    slack = None
    if method == "closed-form":
        flow = solve_bijective(g, lam)
    elif method == "pseudoinverse":
        flow = particular_solution_pseudoinverse(g, lam)
    else:
        if not classify(g).surjective:
            raise InfeasibleError("maximin needs a surjective graph")
        mm = maximin_solution(g, lam)
        flow, slack = mm.flow, mm.slack
    cert = rep.certificate
    if rep.certificate_kind in ("bipartite-component", "independent-set"):
        cert = _nodes(cert)
    payload = {"method": method, "edges": list(g.edge_labels), "flow": flow, "slack": slack,
               "stabilizable": rep.stabilizable, "certificate_kind": rep.certificate_kind,
               "certificate": cert}
    rows = [{"edge": lab, "flow": encode(x)} for lab, x in zip(g.edge_labels, flow)]
    _emit(ctx, "solve", payload, rows)


@main.command()
@click.argument("graph")
@_rates_option
@click.pass_context
def kernel(ctx, graph, rates):
    """Structural kernel basis, origin and construction details."""
    g, lam = _graph_arg(graph, rates)
    kb = kernel_basis(g, rates=lam)
    payload = {
        "edges": list(g.edge_labels),
        "d": kb.d,
        "origin": kb.origin,
        "origin_kind": "maximin" if lam is not None else "zero",
        "vectors": kb.vectors,
        "kinds": [str(k) for k in kb.kinds],
        "generators": [g.edge_labels[k] for k in kb.generators],
        "spanning_tree": [g.edge_labels[k] for k in sorted(kb.spanning_tree)],
        "augmenting_edges": [g.edge_labels[k] for k in kb.augmenting_edges],
    }
    rows = [{"vector": t + 1, "kind": str(kb.kinds[t]),
             **{lab: v for lab, v in zip(g.edge_labels, b)}} for t, b in enumerate(kb.vectors)]
    _emit(ctx, "kernel", payload, rows)


@main.command()
@click.argument("graph")
@_rates_option
@click.pass_context
def vertices(ctx, graph, rates):
    """Vertices and facet structure of the rate polytope."""
    g, lam = _graph_arg(graph, rates)
    p = build_polytope(g, _need_rates(lam))
    verts = enumerate_vertices(p)
    status = classify_inequalities(p, verts)
    payload = {
        "edges": list(g.edge_labels),
        "d": p.d,
        "origin": p.basis.origin,
        "basis": p.basis.vectors,
        "vertices": [{"alpha": v.alpha, "mu": v.mu, "kind": v.kind,
                      "support": [g.edge_labels[k] for k in sorted(v.support)]} for v in verts],
        "tight": status.tight,
        "redundant": status.redundant,
        "essential": status.essential,
        "simple": status.simple,
        "fully_achievable": status.essential and status.simple,
    }
    rows = [{"vertex": t + 1, "kind": v.kind,
             **{f"alpha_{j + 1}": encode(a) for j, a in enumerate(v.alpha)},
             **{f"mu_{lab}": encode(x) for lab, x in zip(g.edge_labels, v.mu)}}
            for t, v in enumerate(verts)]
    _emit(ctx, "vertices", payload, rows)


@main.command("simulate")
@click.argument("graph")
@_rates_option
@click.option("--policy", required=True, help="Policy string, e.g. 'prio:1-2>3-4'.")
@click.option("--steps", type=click.IntRange(min=1), required=True)
@click.option("--checkpoints", type=click.IntRange(min=0), default=0,
              help="Record counters every C arrivals.")
@click.pass_context
def simulate_cmd(ctx, graph, rates, policy, steps, checkpoints):
    """Simulate a policy and report rate estimates."""
    g, lam = _graph_arg(graph, rates)
    lam = _need_rates(lam)
    pol = parse_policy(policy, g)
    r = simulate(g, lam, pol, steps, ctx.obj["seed"], record_every=checkpoints)
    payload = {
        "policy": pol.label(g), "T": steps, "seed": ctx.obj["seed"], "engine": r.engine,
        "edges": list(g.edge_labels),
        "L": r.L, "M": r.M, "Q_final": r.Q_final,
        "rates": r.rate_estimates, "rates_se": r.rate_se,
        "conservation_ok": r.conservation_holds(),
    }
    if g.n <= 16:
        payload["empty_frequency"] = r.empty_frequency()
        payload["sole_frequency"] = [r.sole_frequency(i) for i in range(g.n)]
    c = r.checkpoints
    payload["checkpoints"] = [{"t": int(t), "L": c.L[s], "M": c.M[s], "Q": c.Q[s]}
                              for s, t in enumerate(c.t)]
    rows = []
    for s, t in enumerate(c.t):
        row = {"t": int(t)}
        row.update({f"L_{i + 1}": int(c.L[s, i]) for i in range(g.n)})
        row.update({f"M_{lab}": int(c.M[s, k]) for k, lab in enumerate(g.edge_labels)})
        row.update({f"Q_{i + 1}": int(c.Q[s, i]) for i in range(g.n)})
        rows.append(row)
    _emit(ctx, "simulate", payload, rows)


def _values(text):
    return [v.strip() for v in text.split(",") if v.strip()]


@main.command("sweep")
@click.argument("graph")
@_rates_option
@click.option("--policy", required=True,
              help="Policy string; for k or gamma sweeps it contains {k} or {gamma}.")
@click.option("--variable", type=click.Choice(["beta", "k", "gamma"]), required=True)
@click.option("--values", "values_", required=True, help="Comma-separated grid.")
@click.option("--steps", type=click.IntRange(min=1), required=True)
@click.option("--seeds", type=click.IntRange(min=1), default=1, help="Seeds seed, seed+1, ...")
@click.pass_context
def sweep_cmd(ctx, graph, rates, policy, variable, values_, steps, seeds):
    """Sweep beta (diamond rates), k or gamma; one row per point and seed."""
    values = _values(values_)
    if variable == "beta":
        if graph != "named:diamond":
            raise ValidationError("beta sweeps use GRAPH = named:diamond")
        points = beta_sweep(policy, values)
    else:
        g, lam = _graph_arg(graph, rates)
        lam = _need_rates(lam)
        basis = kernel_basis(g, rates=lam) if classify(g).surjective else None
        if basis is not None and basis.d == 0:
            basis = None
        points = policy_sweep(g, lam, policy, variable, values, basis=basis)
    seed = ctx.obj["seed"]
    rows = sweep(points, steps, tuple(range(seed, seed + seeds)), ctx.obj["threads"])
    _emit(ctx, "sweep", {"variable": variable, "rows": rows}, rows)


@main.command()
@click.argument("name", type=click.Choice(sorted(BUNDLES)))
@click.option("--steps", type=click.IntRange(min=1), default=10**6)
@click.option("--values", "values_", default=None, help="Override the parameter grid.")
@click.pass_context
def bundle(ctx, name, steps, values_):
    """Write a figure-data bundle (CSV plus manifest) into --out (default: .)."""
    values = _values(values_) if values_ else None
    out_dir = ctx.obj["out"] or "."
    csv_path, man_path = write_bundle(name, out_dir, steps, ctx.obj["seed"], values,
                                      ctx.obj["threads"])
    click.echo(f"{csv_path}\n{man_path}")


if __name__ == "__main__":
    sys.exit(main())
