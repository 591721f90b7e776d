"""
JSON and CSV encoding. Rationals become ``"p/q"`` strings, floats keep 12
significant digits, edges and nodes are written 1-based.
"""

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._rational import format_fraction, to_fraction
from .errors import ValidationError
from .graph import build_graph

SCHEMA_VERSION = 1
GRAPH_KEYS = {"n", "edges", "rates"}


def encode(obj):
    """
    Recursively convert to JSON-ready values.

    >>> encode({"a": Fraction(1, 3), "b": [0.1 + 0.2, np.int64(4)]})
    {'a': '1/3', 'b': [0.3, 4]}
    """
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if not np.isfinite(x) else float(f"{x:.12g}")
    if isinstance(obj, np.ndarray):
        return encode(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [encode(v) for v in items]
    return str(obj)


def dumps(obj):
    return json.dumps(encode(obj), indent=2, sort_keys=False) + "\n"


def report(command, payload, elapsed, version):
    return {"command": command, "version": version, "schema": SCHEMA_VERSION,
            "elapsed_seconds": elapsed, "payload": payload}


def parse_graph_json(text, source="<input>"):
    """
    Parse ``{"n": int, "edges": [[i, j], ...], "rates": [...]}``.

    Returns ``(graph, rates or None)``; rates may be numbers or ``"p/q"``.

    >>> g, lam = parse_graph_json('{"n": 3, "edges": [[1, 2], [2, 3], [1, 3]], "rates": ["1/2", 1, 1]}')
    >>> g.edge_labels, [str(x) for x in lam]
    (('1-2', '1-3', '2-3'), ['1/2', '1', '1'])
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ValidationError(f"{source}: top level must be an object")
    unknown = set(data) - GRAPH_KEYS
    if unknown:
        raise ValidationError(f"{source}: unknown keys {sorted(unknown)}")
    if "n" not in data or "edges" not in data:
        raise ValidationError(f"{source}: 'n' and 'edges' are required")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValidationError(f"{source}: 'n' must be an integer")
    edges = data["edges"]
    if not isinstance(edges, list) or not all(isinstance(e, list) and len(e) == 2 for e in edges):
        raise ValidationError(f"{source}: 'edges' must be a list of [i, j] pairs")
    g = build_graph(n, [tuple(e) for e in edges])
    rates = data.get("rates")
    if rates is not None:
        if not isinstance(rates, list):
            raise ValidationError(f"{source}: 'rates' must be a list")
        try:
            rates = tuple(to_fraction(x) for x in rates)
        except (ValueError, TypeError, ZeroDivisionError):
            raise ValidationError(f"{source}: rates must be numbers or 'p/q' strings") from None
    return g, rates


def load_graph(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    return parse_graph_json(text, str(path))


def graph_json(g, rates=None):
    out = {"n": g.n, "edges": [[i + 1, j + 1] for i, j in g.edges]}
    if rates is not None:
        out["rates"] = [format_fraction(to_fraction(x)) for x in rates]
    return out
