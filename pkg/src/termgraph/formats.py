"""Graph documents (JSON) and DOT export.

A graph document looks like::

    {
      "signature": "sort term;\\nop + : (term,term) -> term;\\n",
      "inputs": ["x:term", "y:term"],
      "nodes": [{"id": "1", "op": "+", "children": ["$x", "$y"]}],
      "outputs": {"o": "1"},
      "cyclic": false,
      "s": {"$x": "[x]", "1": "+_1([x],[y])"}
    }

Inputs are referenced as ``$name`` so that input and node ids never clash.
``signature`` may be omitted when one is supplied separately; ``outputs``,
``cyclic`` and ``s`` are optional.  With ``s`` present the document is an
abstract term graph: the coalgebra is read from the table (entries for
inputs default to ``[x]``) instead of being computed from the nodes.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .coalgebra import AbstractTermGraph
from .cospan import CospanTG, from_graph, graph_view
from .errors import ParseError, UnknownNode
from .graphs import ConcreteTermGraph, Cyclic, classify, make_graph
from .signature import Signature, format_signature, parse_signature
from .trees import Context, Leaf, parse_tree, relabel, render


def _ref(name: str, g: ConcreteTermGraph) -> str:
    return f"${name}" if name in g.inputs else name


def _deref(ref: str, inputs, nodes) -> str:
    if ref.startswith("$"):
        if ref[1:] not in inputs:
            raise UnknownNode(f"unknown input {ref!r}")
        return ref[1:]
    if ref not in nodes:
        raise UnknownNode(f"unknown node {ref!r}")
    return ref


def graph_document(g: ConcreteTermGraph, outputs: Mapping[str, str] | None = None, cyclic: bool | None = None, s=None, signature=True) -> dict:
    doc: dict[str, Any] = {}
    if signature:
        doc["signature"] = format_signature(g.sig)
    doc["inputs"] = [f"{a}:{srt}" for a, srt in g.inputs.items()]
    doc["nodes"] = [
        {"id": v, "op": op, "children": [_ref(w, g) for w in kids]} for v, (op, kids) in g.nodes.items()
    ]
    if outputs is not None:
        doc["outputs"] = {b: _ref(x, g) for b, x in outputs.items()}
    if cyclic is not None:
        doc["cyclic"] = cyclic
    if s is not None:
        doc["s"] = {_ref(x, g): render(t) for x, t in s.items()}
    return doc


def read_graph_document(doc: Mapping, sig: Signature | None = None):
    """Returns (graph, outputs or None, cyclic flag or None, s table or None)."""
    if "signature" in doc:
        sig = parse_signature(doc["signature"])
    if sig is None:
        raise ParseError("graph document has no signature and none was supplied")
    inputs = {}
    for item in doc.get("inputs", []):
        name, sep, srt = item.partition(":")
        if not sep:
            if not sig.single_sorted:
                raise ParseError(f"input {item!r} needs a sort")
            srt = sig.sorts[0]
        inputs[name.strip()] = srt.strip()
    ids = [n["id"] for n in doc.get("nodes", [])]
    if len(set(ids)) != len(ids):
        raise ParseError("duplicate node id")
    for v in ids:
        if v.startswith("$") or any(ch in v for ch in "()[],<> \t\n"):
            raise ParseError(f"invalid node id {v!r}")
    nodes = {
        n["id"]: (n["op"], tuple(_deref(r, inputs, ids) for r in n.get("children", [])))
        for n in doc.get("nodes", [])
    }
    g = make_graph(sig, inputs, nodes)
    outputs = None
    if "outputs" in doc:
        outputs = {b: _deref(r, inputs, nodes) for b, r in doc["outputs"].items()}
    s = None
    if "s" in doc:
        s = {a: Leaf(a) for a in inputs}
        names = set(inputs) | set(nodes)
        for ref, text in doc["s"].items():
            s[_deref(ref, inputs, nodes)] = parse_tree(text, sig, names)
    return g, outputs, doc.get("cyclic"), s


def dumps_graph(g, outputs=None, cyclic=None, s=None, signature=True) -> str:
    return json.dumps(graph_document(g, outputs, cyclic, s, signature), indent=2, ensure_ascii=False) + "\n"


def loads_graph(text: str, sig: Signature | None = None):
    return read_graph_document(json.loads(text), sig)


def cospan_document(c: CospanTG, abstract: bool = False) -> str:
    g, outputs, bij = graph_view(c)
    s = None
    if abstract and not c.cyclic:
        s = {bij[x]: relabel(lambda a: a, bij, t) for x, t in c.body.s.items()}
    return dumps_graph(g, outputs, True if c.cyclic else None, s)


def cospan_from_document(text: str, sig: Signature | None = None) -> CospanTG:
    g, outputs, cyclic, s = loads_graph(text, sig)
    if cyclic is None:
        cyclic = isinstance(classify(g), Cyclic)
    if s is not None:
        ctx = Context(dict(g.inputs), g.sorts(), {a: a for a in g.inputs})
        missing = set(ctx.nodes) - set(s)
        if missing:
            raise ParseError(f"s table has no entry for {sorted(missing)}")
        return CospanTG(AbstractTermGraph(g.sig, ctx, {b: s[b] for b in ctx.nodes}), outputs or {})
    return from_graph(g, outputs or {}, cyclic=cyclic)


# -- DOT ---------------------------------------------------------------------

def _q(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def to_dot(g: ConcreteTermGraph, outputs: Mapping[str, str] | None = None) -> str:
    """Inputs as boxes, operations as ellipses, outputs as double circles.
    Edges run from child to parent and carry the argument position."""
    lines = ["digraph termgraph {", "  rankdir=BT;"]
    for a, srt in g.inputs.items():
        lines.append(f"  {_q('in:' + a)} [shape=box, label={_q(a)}];")
    for v, (op, _) in g.nodes.items():
        lines.append(f"  {_q('node:' + v)} [shape=ellipse, label={_q(op)}, xlabel={_q(v)}];")

    def ident(x):
        return _q(("in:" if x in g.inputs else "node:") + x)

    for v, (_, kids) in g.nodes.items():
        for i, w in enumerate(kids, 1):
            lines.append(f"  {ident(w)} -> {_q('node:' + v)} [headlabel={_q(str(i))}];")
    for b, x in (outputs or {}).items():
        lines.append(f"  {_q('out:' + b)} [shape=doublecircle, label={_q(b)}];")
        lines.append(f"  {ident(x)} -> {_q('out:' + b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
