"""Concrete term graphs (A, V, label, children) and their morphisms."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .errors import ArityMismatch, NameClash, SortMismatch, UnknownNode
from .report import Report
from .signature import DEFAULT_SORT, Signature


@dataclass(frozen=True)
class ConcreteTermGraph:
    """Input nodes ``inputs`` (name -> sort) and internal nodes
    ``nodes`` (id -> (op name, children)).  Children name elements of
    A + V, which is literal union since the two name sets are disjoint.
    Dict order of ``nodes`` is kept and used to break ties deterministically.
    """

    sig: Signature
    inputs: Mapping[str, str]
    nodes: Mapping[str, tuple[str, tuple[str, ...]]]

    def label(self, v):
        return self.nodes[v][0]

    def children(self, v):
        return self.nodes[v][1]

    def sort_of(self, name):
        if name in self.inputs:
            return self.inputs[name]
        if name in self.nodes:
            return self.sig.op(self.nodes[name][0]).output
        raise UnknownNode(f"unknown node {name!r}")

    @property
    def names(self):
        return [*self.inputs, *self.nodes]

    def sorts(self) -> dict[str, str]:
        return {n: self.sort_of(n) for n in self.names}

    def edges(self):
        """The relation w |> v as (w, v) pairs between internal nodes."""
        return {(w, v) for v, (_, kids) in self.nodes.items() for w in kids if w in self.nodes}


def make_graph(sig: Signature, inputs, nodes) -> ConcreteTermGraph:
    """Validate and build a graph.

    ``inputs`` is a name -> sort mapping, or an iterable of names when the
    signature is single-sorted.  ``nodes`` maps ids to ``(op, children)``.
    Cyclic graphs are accepted.
    """
    if not isinstance(inputs, Mapping):
        inputs = list(inputs)
        if not sig.single_sorted:
            raise SortMismatch("input sorts are required for a many-sorted signature")
        if len(set(inputs)) != len(inputs):
            raise NameClash("duplicate input name")
        inputs = {a: sig.sorts[0] if sig.sorts else DEFAULT_SORT for a in inputs}
    inputs = dict(inputs)
    nodes = {v: (op, tuple(kids)) for v, (op, kids) in dict(nodes).items()}
    for a, s in inputs.items():
        if s not in sig.sorts:
            raise SortMismatch(f"input {a!r} has unknown sort {s!r}")
    clash = set(inputs) & set(nodes)
    if clash:
        raise NameClash(f"names used both as inputs and internal nodes: {sorted(clash)}")
    g = ConcreteTermGraph(sig, inputs, nodes)
    for v, (op_name, kids) in nodes.items():
        op = sig.op(op_name)
        if len(kids) != op.arity:
            raise ArityMismatch(f"node {v!r}: {op.name} expects {op.arity} children, got {len(kids)}")
        for i, (w, want) in enumerate(zip(kids, op.inputs)):
            if w not in inputs and w not in nodes:
                raise UnknownNode(f"node {v!r} refers to unknown node {w!r}")
            got = g.sort_of(w)
            if got != want:
                raise SortMismatch(f"child {i + 1} of node {v!r} has sort {got}, expected {want}")
    return g


@dataclass(frozen=True)
class Acyclic:
    order: tuple[str, ...]


@dataclass(frozen=True)
class Cyclic:
    witness: tuple[str, ...]


Classification = Union[Acyclic, Cyclic]


def topological_order(nodes: Mapping[str, Iterable[str]]):
    """Kahn's algorithm on an id -> children table (children outside the
    table are ignored).  Returns (order, leftover) where leftover is empty
    iff the child relation is acyclic."""
    index = {v: i for i, v in enumerate(nodes)}
    parents = {v: set() for v in nodes}
    pending = {}
    for v, kids in nodes.items():
        internal = {w for w in kids if w in index}
        pending[v] = len(internal)
        for w in internal:
            parents[w].add(v)
    ready = [index[v] for v, n in pending.items() if n == 0]
    heapq.heapify(ready)
    names = list(nodes)
    order = []
    while ready:
        v = names[heapq.heappop(ready)]
        order.append(v)
        for p in parents[v]:
            pending[p] -= 1
            if pending[p] == 0:
                heapq.heappush(ready, index[p])
    leftover = [v for v in nodes if pending[v] > 0]
    return order, leftover


def find_cycle(nodes: Mapping[str, Iterable[str]], among):
    """A cycle of the child relation inside ``among``, where every member of
    ``among`` has a child in ``among``; rotated to start at the earliest node."""
    index = {v: i for i, v in enumerate(nodes)}
    among = set(among)
    v = min(among, key=index.__getitem__)
    path, seen = [], {}
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = next(w for w in nodes[v] if w in among)
    cycle = path[seen[v]:]
    k = min(range(len(cycle)), key=lambda i: index[cycle[i]])
    return tuple(cycle[k:] + cycle[:k])


def classify(g: ConcreteTermGraph) -> Classification:
    table = {v: kids for v, (_, kids) in g.nodes.items()}
    order, leftover = topological_order(table)
    if leftover:
        return Cyclic(find_cycle(table, leftover))
    return Acyclic(tuple(order))


def is_acyclic(g: ConcreteTermGraph) -> bool:
    return isinstance(classify(g), Acyclic)


def check_morphism(src: ConcreteTermGraph, dst: ConcreteTermGraph, on_inputs, on_internal) -> Report:
    """Check ``l'(g(v)) = l(v)`` and ``(f+g)(phi_i(v)) = phi'_i(g(v))``."""
    report = Report(("sort", "label", "children"))
    both = {**on_inputs, **on_internal}
    for a in src.inputs:
        if a not in on_inputs or on_inputs[a] not in dst.inputs:
            report.add("sort", a, f"input {a!r} not sent to an input of the target")
        elif src.inputs[a] != dst.inputs[on_inputs[a]]:
            report.add("sort", a, "sort not preserved")
    for v, (op, kids) in src.nodes.items():
        gv = on_internal.get(v)
        if gv not in dst.nodes:
            report.add("sort", v, f"internal node {v!r} not sent to an internal node of the target")
            continue
        if dst.label(gv) != op:
            report.add("label", v, f"label {op} at {v} but {dst.label(gv)} at image {gv}")
            continue
        for i, (w, w2) in enumerate(zip(kids, dst.children(gv))):
            if both.get(w) != w2:
                report.add("children", (v, i + 1), f"child {i + 1} of {v} is {w}, sent to {both.get(w)}, but child of {gv} is {w2}")
    return report


def compose_maps(first: Mapping, second: Mapping) -> dict:
    return {x: second[y] for x, y in first.items()}
