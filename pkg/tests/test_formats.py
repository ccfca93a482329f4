import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from termgraph.cospan import equiv, to_graph
from termgraph.errors import ParseError, UnknownNode
from termgraph.formats import cospan_document, cospan_from_document, dumps_graph, loads_graph, to_dot

from generators import SIGMA0, random_cospan, random_graph, random_signature

FIXTURES = Path(__file__).parent / "fixtures"


def test_read_example():
    g, outputs, cyclic, s = loads_graph((FIXTURES / "example_open.json").read_text(encoding="utf-8"))
    assert g.inputs == {"x": "term", "y": "term"}
    assert g.nodes["2"] == ("*", ("x", "1"))
    assert outputs == {"r": "2"} and cyclic is None and s is None


@settings(max_examples=150)
@given(st.integers(0, 10**9), st.booleans())
def test_graph_round_trip(seed, cyclic):
    rng = random.Random(seed)
    sig = random_signature(rng) if seed % 2 else SIGMA0
    g = random_graph(rng, sig, cyclic=cyclic)
    back, _, _, _ = loads_graph(dumps_graph(g))
    assert back == g and list(back.nodes) == list(g.nodes)


@settings(max_examples=100)
@given(st.integers(0, 10**9), st.booleans(), st.booleans())
def test_cospan_round_trip(seed, cyclic, abstract):
    c = random_cospan(random.Random(seed), cyclic=cyclic)
    back = cospan_from_document(cospan_document(c, abstract=abstract))
    assert equiv(c, back) is not None


def test_abstract_table_is_read():
    doc = json.loads((FIXTURES / "example_open.json").read_text(encoding="utf-8"))
    doc["s"] = {"1": "+_1([x],[y])", "2": "*_2([x],+_1([x],[y]))"}
    c = cospan_from_document(json.dumps(doc))
    assert c.body.validate().ok
    doc["s"]["2"] = "*_2([x],+_1([y],[y]))"
    bad = cospan_from_document(json.dumps(doc))
    assert not bad.body.validate().ok
    del doc["s"]["2"]
    with pytest.raises(ParseError):
        cospan_from_document(json.dumps(doc))


def test_document_errors():
    base = {"inputs": ["x"], "nodes": [{"id": "1", "op": "+", "children": ["$x", "$x"]}]}
    with pytest.raises(ParseError):
        loads_graph(json.dumps(base))
    with pytest.raises(UnknownNode):
        loads_graph(json.dumps(dict(base, nodes=[{"id": "1", "op": "+", "children": ["$z", "$x"]}])), SIGMA0)
    with pytest.raises(ParseError):
        loads_graph(json.dumps(dict(base, nodes=[{"id": "$1", "op": "α"}])), SIGMA0)
    dup = [{"id": "1", "op": "α"}, {"id": "1", "op": "β"}]
    with pytest.raises(ParseError):
        loads_graph(json.dumps(dict(base, nodes=dup)), SIGMA0)


def test_cyclic_flag_defaults_from_shape():
    doc = {"inputs": [], "nodes": [{"id": "b", "op": "+", "children": ["b", "b"]}], "outputs": {"o": "b"}}
    assert cospan_from_document(json.dumps(doc), SIGMA0).cyclic
    doc = {"inputs": [], "nodes": [{"id": "b", "op": "α"}], "outputs": {"o": "b"}}
    assert not cospan_from_document(json.dumps(doc), SIGMA0).cyclic


def test_dot_export():
    g, outputs, _, _ = loads_graph((FIXTURES / "example_open.json").read_text(encoding="utf-8"))
    dot = to_dot(g, outputs)
    assert dot.startswith("digraph termgraph {")
    assert '"in:x" [shape=box, label="x"];' in dot
    assert '"node:1" -> "node:2" [headlabel="2"];' in dot
    assert '"out:r" [shape=doublecircle, label="r"];' in dot
    assert to_dot(g, outputs) == dot


def test_dot_of_converted_cospan_is_deterministic():
    c = random_cospan(random.Random(1))
    g, outputs = to_graph(c)
    assert to_dot(g, outputs) == to_dot(*to_graph(c))
