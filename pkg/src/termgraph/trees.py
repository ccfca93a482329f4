"""Finite labelled trees: elements of Pf = muX. A + B x F(X).

A tree is either a bare leaf ``[a]`` for a variable ``a`` of A, or a node
``op_b(z1, ..., zn)`` carrying an operation and a label ``b`` of B.  Labels
and leaf contents are arbitrary hashables, so the same classes also represent
the iterated objects P(lambda_f) (labels are trees) and P(rho_f) (leaves are
trees) used by the comultiplication and the flattening map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Union

from .errors import ArityMismatch, ParseError, SortMismatch, UnknownElement
from .signature import Signature


@dataclass(frozen=True)
class Leaf:
    var: Any


@dataclass(frozen=True)
class Node:
    label: Any
    op: str
    children: tuple = ()


@dataclass(frozen=True)
class Cut:
    """Truncation marker left by depth-bounded unfolding of a cyclic graph."""

    node: Any


PTree = Union[Leaf, Node]


@dataclass(frozen=True)
class Context:
    """An object f: A -> B of the arrow category of sorted finite sets.

    ``inputs`` and ``nodes`` map element names to sorts; ``embed`` is f.
    """

    inputs: Mapping[str, str]
    nodes: Mapping[str, str]
    embed: Mapping[str, str] = field(default_factory=dict)

    def check(self, injective=True):
        for a, b in self.embed.items():
            if a not in self.inputs:
                raise UnknownElement(f"embedding defined on unknown variable {a!r}")
            if b not in self.nodes:
                raise UnknownElement(f"variable {a!r} embedded at unknown node {b!r}")
            if self.inputs[a] != self.nodes[b]:
                raise SortMismatch(f"variable {a!r} has sort {self.inputs[a]} but node {b!r} has sort {self.nodes[b]}")
        missing = set(self.inputs) - set(self.embed)
        if missing:
            raise UnknownElement(f"embedding undefined on {sorted(missing)}")
        if injective and len(set(self.embed.values())) != len(self.embed):
            raise SortMismatch("variable embedding is not injective")
        return self


def _call(m, x):
    if isinstance(m, Mapping):
        try:
            return m[x]
        except KeyError:
            raise UnknownElement(f"{x!r} outside the domain of a renaming") from None
    return m(x)


def relabel(h, k, t):
    """P(h, k): rename leaves by ``h`` and node labels by ``k``.

    ``h`` and ``k`` are mappings or callables.
    """
    match t:
        case Leaf(a):
            return Leaf(_call(h, a))
        case Node(b, op, kids):
            return Node(_call(k, b), op, tuple(relabel(h, k, z) for z in kids))
        case Cut(b):
            return Cut(_call(k, b))
    raise TypeError(f"not a tree: {t!r}")


def counit_root(ctx: Context, t):
    """rho_f: f(a) on a leaf [a], the root label on a node."""
    match t:
        case Leaf(a):
            if a not in ctx.embed:
                raise UnknownElement(f"unknown variable {a!r}")
            return ctx.embed[a]
        case Node(b, _, _) | Cut(b):
            return b
    raise TypeError(f"not a tree: {t!r}")


def comult(t):
    """sigma_f: recursively relabel every node by the subtree rooted there."""
    match t:
        case Leaf():
            return t
        case Node(_, op, kids):
            return Node(t, op, tuple(comult(z) for z in kids))
    raise TypeError(f"not a tree: {t!r}")


def flatten(tt):
    """pi_f: splice the trees stored at the leaves of ``tt`` into place."""
    match tt:
        case Leaf(inner):
            return inner
        case Node(b, op, kids):
            return Node(b, op, tuple(flatten(z) for z in kids))
    raise TypeError(f"not a tree: {tt!r}")


def leaf_wrap(a):
    """lambda_f as a plain function on variables."""
    return Leaf(a)


def depth(t) -> int:
    match t:
        case Leaf() | Cut():
            return 0
        case Node(_, _, kids):
            return max((depth(z) for z in kids), default=0) + 1
    raise TypeError(f"not a tree: {t!r}")


def size(t) -> int:
    match t:
        case Node(_, _, kids):
            return 1 + sum(size(z) for z in kids)
    return 1


def labels(t):
    """All node labels of ``t`` in pre-order (with repetition)."""
    out = []

    def walk(u):
        if isinstance(u, Node):
            out.append(u.label)
            for z in u.children:
                walk(z)

    walk(t)
    return out


def is_prefix(short, long) -> bool:
    """True when ``long`` is obtained from ``short`` by expanding Cut markers."""
    match short:
        case Cut(b):
            return isinstance(long, Cut) and long.node == b or isinstance(long, Node) and long.label == b
        case Leaf():
            return short == long
        case Node(b, op, kids):
            return (
                isinstance(long, Node)
                and long.label == b
                and long.op == op
                and len(long.children) == len(kids)
                and all(is_prefix(x, y) for x, y in zip(kids, long.children))
            )
    return False


def tree_sort(sig: Signature, ctx: Context, t) -> str:
    """Check ``t`` is a well-sorted element of Pf over ``ctx``; return its sort."""
    match t:
        case Leaf(a):
            if a not in ctx.inputs:
                raise UnknownElement(f"leaf [{a}] is not a variable")
            return ctx.inputs[a]
        case Node(b, op_name, kids):
            op = sig.op(op_name)
            if b not in ctx.nodes:
                raise UnknownElement(f"node label {b!r} is not a node")
            if ctx.nodes[b] != op.output:
                raise SortMismatch(f"label {b!r} has sort {ctx.nodes[b]} but {op.name} returns {op.output}")
            if len(kids) != op.arity:
                raise ArityMismatch(f"{op.name} expects {op.arity} arguments, got {len(kids)}")
            for i, (z, want) in enumerate(zip(kids, op.inputs)):
                got = tree_sort(sig, ctx, z)
                if got != want:
                    raise SortMismatch(f"argument {i + 1} of {op.name} has sort {got}, expected {want}")
            return op.output
    raise TypeError(f"not a tree: {t!r}")


# -- canonical text rendering ------------------------------------------------

def render(t) -> str:
    """``[x]`` for leaves, ``op_label(child,...)`` for nodes, ``<cut b>`` for cuts."""
    match t:
        case Leaf(a):
            return f"[{render(a)}]"
        case Node(b, op, kids):
            return f"{op}_{render(b)}({','.join(render(z) for z in kids)})"
        case Cut(b):
            return f"<cut {render(b)}>"
    return str(t)


def parse_tree(text: str, sig: Signature, nodes: Mapping[str, Any] | None = None):
    """Parse a canonical rendering back into a tree.

    The head ``op_label`` is split at the underscore that leaves a known
    operation on the left (and, when ``nodes`` is given, a known node on
    the right); the split must be unambiguous.
    """
    pos = 0

    def fail(msg):
        raise ParseError(f"{msg} at offset {pos} in {text!r}")

    def parse():
        nonlocal pos
        if text.startswith("[", pos):
            end = text.find("]", pos)
            if end < 0:
                fail("unterminated leaf")
            var = text[pos + 1:end]
            pos = end + 1
            return Leaf(var)
        end = text.find("(", pos)
        if end < 0:
            fail("expected '('")
        head = text[pos:end]
        splits = [
            (head[:i], head[i + 1:])
            for i, ch in enumerate(head)
            if ch == "_" and sig.has_op(head[:i]) and (nodes is None or head[i + 1:] in nodes)
        ]
        if len(splits) != 1:
            fail(f"cannot split {head!r} into operation and label")
        op, label = splits[0]
        pos = end + 1
        kids = []
        if text.startswith(")", pos):
            pos += 1
            return Node(label, op, ())
        while True:
            kids.append(parse())
            if text.startswith(",", pos):
                pos += 1
            elif text.startswith(")", pos):
                pos += 1
                return Node(label, op, tuple(kids))
            else:
                fail("expected ',' or ')'")

    text = "".join(text.split())
    t = parse()
    if pos != len(text):
        fail("trailing input")
    return t
