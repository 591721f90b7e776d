import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from matchlab.errors import ValidationError
from matchlab.serialize import dumps, encode, graph_json, load_graph, parse_graph_json, report

from .strategies import graphs


@pytest.mark.parametrize(
    "value, want",
    [
        (F(3, 4), "3/4"), (F(2), "2"), (np.float64(1 / 3), 0.333333333333), (np.int8(5), 5),
        (frozenset({3, 1}), [1, 3]), (np.arange(3), [0, 1, 2]), (True, True), (None, None),
        (float("nan"), float("nan")),
    ],
)
def test_encode(value, want):
    got = encode(value)
    if isinstance(want, float) and want != want:
        assert got != got
    else:
        assert got == want


def test_report_envelope():
    out = json.loads(dumps(report("analyze", {"x": F(1, 2)}, 0.5, "0.1.0")))
    assert out == {"command": "analyze", "version": "0.1.0", "schema": 1,
                   "elapsed_seconds": 0.5, "payload": {"x": "1/2"}}


@given(graphs(), st.data())
def test_graph_round_trip(g, data):
    rates = data.draw(st.lists(st.fractions(F(1, 9), 9, max_denominator=9), min_size=g.n,
                               max_size=g.n))
    g2, r2 = parse_graph_json(json.dumps(graph_json(g, rates)))
    assert g2 == g and r2 == tuple(rates)


@pytest.mark.parametrize(
    "text, message",
    [
        ('{"n": 3,\n "edges": [}', "<input>:2:12"),
        ("[1, 2]", "object"),
        ('{"n": 2, "edges": [], "weights": []}', "unknown keys"),
        ('{"edges": []}', "required"),
        ('{"n": "3", "edges": []}', "integer"),
        ('{"n": 3, "edges": [[1, 2, 3]]}', "pairs"),
        ('{"n": 2, "edges": [[1, 2]], "rates": "1,1"}', "list"),
        ('{"n": 2, "edges": [[1, 2]], "rates": ["a", 1]}', "numbers"),
        ('{"n": 2, "edges": [[1, 3]]}', "out of range"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(ValidationError, match=message):
        parse_graph_json(text)


def test_load_graph(tmp_path):
    path = tmp_path / "g.json"
    path.write_text('{"n": 3, "edges": [[1, 2], [2, 3], [1, 3]]}')
    g, rates = load_graph(path)
    assert g.m == 3 and rates is None
    with pytest.raises(ValidationError, match="cannot read"):
        load_graph(tmp_path / "missing.json")
