"""Abstract term graphs (coalgebras f: A -> B, s: B -> Pf) and cyclic term
graphs (f: A -> B, step: B -> A + F(B)), with the translations to and from
concrete graphs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .errors import ArityMismatch, CyclicInput, LawViolation, SortMismatch, UnknownElement
from .graphs import Acyclic, Classification, ConcreteTermGraph, Cyclic, classify, make_graph
from .report import Report
from .signature import Signature
from .trees import Context, Cut, Leaf, Node, comult, counit_root, depth, relabel, render, tree_sort

ATG_LAWS = ("counit", "comultiplication", "leaf")


@dataclass(frozen=True)
class AbstractTermGraph:
    sig: Signature
    ctx: Context
    s: Mapping[str, object]

    def validate(self) -> Report:
        return validate_atg(self.sig, self.ctx, self.s)


@dataclass(frozen=True)
class Var:
    var: str


@dataclass(frozen=True)
class Op:
    op: str
    children: tuple[str, ...] = ()


Step = Union[Var, Op]


@dataclass(frozen=True)
class CyclicCoalgebra:
    sig: Signature
    ctx: Context
    step: Mapping[str, Step]

    def validate(self) -> Report:
        return validate_cyclic(self.sig, self.ctx, self.step)


def _first_difference(x, y, path=()):
    """Path and subterms of the first position where two trees differ."""
    if x == y:
        return None
    if isinstance(x, Node) and isinstance(y, Node) and x.op == y.op and x.label == y.label:
        for i, (u, v) in enumerate(zip(x.children, y.children)):
            found = _first_difference(u, v, path + (i + 1,))
            if found:
                return found
    return path, x, y


def _render_label(x):
    return render(x) if isinstance(x, (Leaf, Node)) else str(x)


def validate_atg(sig: Signature, ctx: Context, s: Mapping) -> Report:
    """Check ``s . f = lambda_f``, ``rho_f . s = 1`` and
    ``P(1, s) . s = sigma_f . s``.

    Raises on malformed data (``s`` not total, ill-sorted trees); law
    failures are collected in the returned report.
    """
    ctx.check(injective=False)
    missing = set(ctx.nodes) - set(s)
    if missing:
        raise UnknownElement(f"coalgebra map undefined on {sorted(missing)}")
    for b in ctx.nodes:
        got = tree_sort(sig, ctx, s[b])
        if got != ctx.nodes[b]:
            raise SortMismatch(f"s({b}) has sort {got}, but {b} has sort {ctx.nodes[b]}")

    report = Report(ATG_LAWS)
    for a, b in ctx.embed.items():
        if s[b] != Leaf(a):
            report.add("leaf", a, f"s(f({a})) = {render(s[b])}, expected [{a}]")
    for b in ctx.nodes:
        root = counit_root(ctx, s[b])
        if root != b:
            report.add("counit", b, f"root of s({b}) is {root}, expected {b}")
    for b in ctx.nodes:
        t = s[b]
        lhs = relabel(lambda a: a, s, t)
        rhs = comult(t)
        diff = _first_difference(lhs, rhs)
        if diff:
            path, u, v = diff
            where = ".".join(map(str, path)) or "root"
            report.add(
                "comultiplication",
                b,
                f"at {where}: P(1,s) gives label {_render_label(getattr(u, 'label', u))}"
                f" but sigma gives {_render_label(getattr(v, 'label', v))}",
            )
    return report


def to_abstract(g: ConcreteTermGraph) -> AbstractTermGraph:
    """The coalgebra on inl: A -> A + V with ``s(v) = l(v)_v(s(phi(v)))``."""
    c = classify(g)
    if isinstance(c, Cyclic):
        raise CyclicInput(f"graph has a cycle through {list(c.witness)}")
    s = {a: Leaf(a) for a in g.inputs}
    for v in c.order:
        op, kids = g.nodes[v]
        s[v] = Node(v, op, tuple(s[w] for w in kids))
    ctx = Context(dict(g.inputs), g.sorts(), {a: a for a in g.inputs})
    return AbstractTermGraph(g.sig, ctx, {b: s[b] for b in ctx.nodes})


def _bijection(ctx: Context):
    """Canonical B ~ A + V: f(a) goes to a; other nodes keep their name
    unless it collides with a variable name."""
    inv = {b: a for a, b in ctx.embed.items()}
    taken = set(ctx.inputs)
    bij = {}
    for b in ctx.nodes:
        if b in inv:
            bij[b] = inv[b]
            continue
        name, n = b, 0
        while name in taken:
            n += 1
            name = f"{b}_{n}"
        taken.add(name)
        bij[b] = name
    return bij


def from_abstract(atg: AbstractTermGraph):
    """Recover (graph, bijection B -> A + V); ``phi_i(v) = rho_f(z_i)``."""
    report = atg.validate()
    if not report.ok:
        raise LawViolation(report)
    ctx = atg.ctx
    bij = _bijection(ctx)
    nodes = {}
    for b in ctx.nodes:
        t = atg.s[b]
        if isinstance(t, Node):
            nodes[bij[b]] = (t.op, tuple(bij[counit_root(ctx, z)] for z in t.children))
    return make_graph(atg.sig, dict(ctx.inputs), nodes), bij


def _check_square(report, src: Context, dst: Context, h: Mapping, k: Mapping):
    """(h, k) must be sort-preserving maps with ``g . h = k . f``."""
    for a, srt in src.inputs.items():
        if h.get(a) not in dst.inputs:
            report.add("square", a, f"h undefined or outside target at {a}")
        elif dst.inputs[h[a]] != srt:
            report.add("square", a, f"h({a}) = {h[a]} changes sort {srt} to {dst.inputs[h[a]]}")
    for b, srt in src.nodes.items():
        if k.get(b) not in dst.nodes:
            report.add("square", b, f"k undefined or outside target at {b}")
        elif dst.nodes[k[b]] != srt:
            report.add("square", b, f"k({b}) = {k[b]} changes sort {srt} to {dst.nodes[k[b]]}")
    for a, b in src.embed.items():
        if h.get(a) in dst.embed and dst.embed[h[a]] != k.get(b):
            report.add("square", a, f"g(h({a})) != k(f({a}))")


def check_atg_morphism(src: AbstractTermGraph, dst: AbstractTermGraph, h: Mapping, k: Mapping) -> Report:
    """Check ``(h, k)`` is a commuting square with ``P(h,k) . s = s' . k``."""
    report = Report(("square", "coalgebra"))
    _check_square(report, src.ctx, dst.ctx, h, k)
    for b in src.ctx.nodes:
        if k.get(b) not in dst.ctx.nodes:
            continue
        try:
            lhs = relabel(h, k, src.s[b])
        except UnknownElement as e:
            report.add("coalgebra", b, str(e))
            continue
        rhs = dst.s[k[b]]
        if lhs != rhs:
            report.add("coalgebra", b, f"P(h,k)(s({b})) = {render(lhs)} but s'({k[b]}) = {render(rhs)}")
    return report


# -- cyclic term graphs ------------------------------------------------------

def validate_cyclic(sig: Signature, ctx: Context, step: Mapping) -> Report:
    """Check ``s . f = inl`` and that only variable nodes step to variables.

    Arity and sort errors are malformed data and raise.
    """
    ctx.check(injective=False)
    missing = set(ctx.nodes) - set(step)
    if missing:
        raise UnknownElement(f"step map undefined on {sorted(missing)}")
    report = Report(("leaf",))
    for b in ctx.nodes:
        match step[b]:
            case Var(a):
                if a not in ctx.inputs:
                    raise UnknownElement(f"step({b}) names unknown variable {a!r}")
                if ctx.embed.get(a) != b:
                    report.add("leaf", b, f"step({b}) = {a} but f({a}) = {ctx.embed.get(a)}")
            case Op(name, kids):
                op = sig.op(name)
                if op.output != ctx.nodes[b]:
                    raise SortMismatch(f"node {b!r} has sort {ctx.nodes[b]} but {name} returns {op.output}")
                if len(kids) != op.arity:
                    raise ArityMismatch(f"node {b!r}: {name} expects {op.arity} children, got {len(kids)}")
                for w, want in zip(kids, op.inputs):
                    if w not in ctx.nodes:
                        raise UnknownElement(f"node {b!r} refers to unknown node {w!r}")
                    if ctx.nodes[w] != want:
                        raise SortMismatch(f"child {w!r} of {b!r} has sort {ctx.nodes[w]}, expected {want}")
                if b in ctx.embed.values():
                    a = next(a for a, x in ctx.embed.items() if x == b)
                    report.add("leaf", a, f"f({a}) = {b} steps to an operation")
            case other:
                raise TypeError(f"not a step: {other!r}")
    return report


def to_cyclic(g: ConcreteTermGraph) -> CyclicCoalgebra:
    """The step map A + l: A + V -> A + F(A + V); cycles allowed."""
    step = {a: Var(a) for a in g.inputs}
    for v, (op, kids) in g.nodes.items():
        step[v] = Op(op, tuple(kids))
    ctx = Context(dict(g.inputs), g.sorts(), {a: a for a in g.inputs})
    return CyclicCoalgebra(g.sig, ctx, step)


def from_cyclic(c: CyclicCoalgebra):
    """Extract (graph, bijection B -> A + V) from a cyclic coalgebra."""
    report = c.validate()
    if not report.ok:
        raise LawViolation(report)
    bij = _bijection(c.ctx)
    nodes = {
        bij[b]: (st.op, tuple(bij[w] for w in st.children))
        for b, st in c.step.items()
        if isinstance(st, Op)
    }
    return make_graph(c.sig, dict(c.ctx.inputs), nodes), bij


def unfold(c: CyclicCoalgebra, root: str, depth: int):
    """Depth-bounded prefix of the possibly-infinite tree unfolding ``root``.

    Operations below the depth bound are replaced by ``Cut`` markers.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if root not in c.step:
        raise UnknownElement(f"unknown node {root!r}")

    def go(b, n):
        match c.step[b]:
            case Var(a):
                return Leaf(a)
            case Op(op, kids):
                if n == 0:
                    return Cut(b)
                return Node(b, op, tuple(go(w, n - 1) for w in kids))

    return go(root, depth)


def classify_coalgebra(c: CyclicCoalgebra) -> Classification:
    g, bij = from_cyclic(c)
    back = {v: b for b, v in bij.items()}
    match classify(g):
        case Acyclic(order):
            return Acyclic(tuple(back[v] for v in order))
        case Cyclic(witness):
            return Cyclic(tuple(back[v] for v in witness))


def cyclic_to_abstract(c: CyclicCoalgebra) -> AbstractTermGraph:
    """The acyclic coalgebra presenting the same graph, keeping B's names."""
    if isinstance(classify_coalgebra(c), Cyclic):
        raise CyclicInput("coalgebra is cyclic")
    bound = max(len(c.ctx.nodes), 1)
    return AbstractTermGraph(c.sig, c.ctx, {b: unfold(c, b, bound) for b in c.ctx.nodes})


def abstract_to_cyclic(atg: AbstractTermGraph) -> CyclicCoalgebra:
    step = {}
    for b, t in atg.s.items():
        match t:
            case Leaf(a):
                step[b] = Var(a)
            case Node(_, op, kids):
                step[b] = Op(op, tuple(counit_root(atg.ctx, z) for z in kids))
    return CyclicCoalgebra(atg.sig, atg.ctx, step)


def check_cyclic_morphism(src: CyclicCoalgebra, dst: CyclicCoalgebra, h: Mapping, k: Mapping) -> Report:
    """Check ``step' . k = (h + F k) . step``."""
    report = Report(("square", "coalgebra"))
    _check_square(report, src.ctx, dst.ctx, h, k)
    for b, st in src.step.items():
        if k.get(b) not in dst.step:
            continue
        match st:
            case Var(a):
                image = Var(h.get(a))
            case Op(op, kids):
                image = Op(op, tuple(k.get(w) for w in kids))
        if dst.step[k[b]] != image:
            report.add("coalgebra", b, f"step'({k[b]}) = {dst.step[k[b]]} but image of step({b}) = {image}")
    return report


def max_depth(atg: AbstractTermGraph) -> int:
    return max((depth(t) for t in atg.s.values()), default=0)
