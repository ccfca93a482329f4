"""Term graphs from A to B: cospans A -> X <- B whose left leg carries a
coalgebra structure, composed by pushout.

Composition is defined on representatives and returns a canonically renamed
result (see ``canonicalize``); ``equiv`` decides equality of the underlying
morphisms of the quotient category.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Union

from .coalgebra import (
    AbstractTermGraph,
    CyclicCoalgebra,
    Op,
    Var,
    abstract_to_cyclic,
    check_atg_morphism,
    check_cyclic_morphism,
    classify_coalgebra,
    from_abstract,
    from_cyclic,
    to_abstract,
    to_cyclic,
)
from .errors import BoundaryMismatch, CyclicInput, LawViolation, NotAPushout, SortMismatch, UnknownElement
from .graphs import Acyclic, ConcreteTermGraph, make_graph
from .semantics import Algebra, lift, solve_cyclic
from .signature import Signature
from .trees import Context, Leaf, flatten, relabel

Body = Union[AbstractTermGraph, CyclicCoalgebra]


@dataclass(frozen=True)
class CospanTG:
    """``body`` is the coalgebra on f: A -> X; ``out`` is g: B -> X."""

    body: Body
    out: Mapping[str, str]

    @property
    def sig(self) -> Signature:
        return self.body.sig

    @property
    def source(self) -> dict:
        return dict(self.body.ctx.inputs)

    @property
    def apex(self) -> dict:
        return dict(self.body.ctx.nodes)

    @property
    def target(self) -> dict:
        return {b: self.body.ctx.nodes[x] for b, x in self.out.items()}

    @property
    def cyclic(self) -> bool:
        return isinstance(self.body, CyclicCoalgebra)

    def validate(self):
        report = self.body.validate()
        if not report.ok:
            raise LawViolation(report)
        for b, x in self.out.items():
            if x not in self.body.ctx.nodes:
                raise UnknownElement(f"output {b!r} points at unknown node {x!r}")
        return self


def _identity(xs):
    return {x: x for x in xs}


def as_cyclic(body: Body) -> CyclicCoalgebra:
    """The body in step-map form."""
    return body if isinstance(body, CyclicCoalgebra) else abstract_to_cyclic(body)


def with_signature(c: CospanTG, sig: Signature) -> CospanTG:
    """``c`` over a larger signature containing every operation it uses."""
    for x, st in as_cyclic(c.body).step.items():
        if isinstance(st, Op) and sig.op(st.op) != c.sig.op(st.op):
            raise SortMismatch(f"operation {st.op!r} has a different type in the new signature")
    missing = set(c.sig.sorts) - set(sig.sorts)
    if missing:
        raise SortMismatch(f"sorts {sorted(missing)} are missing from the new signature")
    return CospanTG(replace(c.body, sig=sig), c.out)


# -- pushouts ----------------------------------------------------------------

def pushout(g1: Mapping, g2: Mapping, X: Mapping[str, str], Y: Mapping[str, str]):
    """Pushout of ``g1: B -> X`` and ``g2: B -> Y`` in sorted finite sets.

    Returns ``(Z, p, q)``.  Each class of (X + Y)/~ is named after its least
    member; name collisions between classes get a numeric suffix.
    """
    parent = {}

    def find(e):
        while parent.setdefault(e, e) != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    elements = [(0, x) for x in X] + [(1, y) for y in Y]
    for e in elements:
        find(e)
    if set(g1) != set(g2):
        raise UnknownElement("the two legs have different domains")
    for b in g1:
        x, y = g1[b], g2[b]
        if x not in X or y not in Y:
            raise UnknownElement(f"leg image of {b!r} outside its codomain")
        if X[x] != Y[y]:
            raise SortMismatch(f"{b!r} glues {x!r}: {X[x]} to {y!r}: {Y[y]}")
        rx, ry = find((0, x)), find((1, y))
        if rx != ry:
            parent[max(rx, ry, key=lambda e: (e[1], e[0]))] = min(rx, ry, key=lambda e: (e[1], e[0]))

    classes = {}
    for e in elements:
        classes.setdefault(find(e), []).append(e)
    names = {}
    taken = set()
    for root in sorted(classes, key=lambda e: (e[1], e[0])):
        name, n = root[1], 0
        while name in taken:
            n += 1
            name = f"{root[1]}_{n}"
        taken.add(name)
        names[root] = name
    Z, p, q = {}, {}, {}
    for side, x in elements:
        z = names[find((side, x))]
        Z[z] = X[x] if side == 0 else Y[x]
        (p if side == 0 else q)[x] = z
    return Z, p, q


def _check_pushout(f, h, g, k, B, C, D):
    """Raise unless the square f: A->B, h: A->C, g: C->D, k: B->D is a pushout."""
    for a in f:
        if g.get(h[a]) != k.get(f[a]):
            raise NotAPushout(f"square does not commute at {a!r}")
    Z, p, q = pushout(f, h, B, C)
    compare = {}
    for b, z in p.items():
        compare.setdefault(z, set()).add(k[b])
    for c, z in q.items():
        compare.setdefault(z, set()).add(g[c])
    if any(len(v) != 1 for v in compare.values()):
        raise NotAPushout("square does not commute")
    image = [next(iter(v)) for v in compare.values()]
    if len(set(image)) != len(image) or set(image) != set(D):
        raise NotAPushout("comparison map from the pushout is not a bijection")


def pushout_coalgebra(atg: AbstractTermGraph, h: Mapping, g: Mapping, k: Mapping, D: Mapping[str, str]) -> AbstractTermGraph:
    """Push the coalgebra on f: A -> B out along h: A -> C.

    The square is ``g . h = k . f`` with g: C -> D.  The result is the unique
    t: D -> Pg with ``t . g = lambda_g`` and ``t . k = P(h, k) . s``.
    """
    report = atg.validate()
    if not report.ok:
        raise LawViolation(report)
    C = {c: D[g[c]] for c in g}
    _check_pushout(atg.ctx.embed, h, g, k, atg.ctx.nodes, C, D)
    t = {}
    for b, tree in atg.s.items():
        t[k[b]] = relabel(h, k, tree)
    for c, d in g.items():
        t[d] = Leaf(c)
    ctx = Context(C, dict(D), dict(g))
    return AbstractTermGraph(atg.sig, ctx, {d: t[d] for d in D})


def compose_coalgebra(first: AbstractTermGraph, second: AbstractTermGraph) -> AbstractTermGraph:
    """Coalgebra on g . f from coalgebras s on f: A -> B and t on g: B -> C.

    ``xi = P(1, g) . s``; the result is ``pi_gf . P(xi, 1) . t``: substitute
    the relabelled s-trees for the leaves of the t-trees.
    """
    for atg in (first, second):
        report = atg.validate()
        if not report.ok:
            raise LawViolation(report)
    if dict(second.ctx.inputs) != dict(first.ctx.nodes):
        raise BoundaryMismatch("codomain of the first map is not the domain of the second")
    g = second.ctx.embed
    xi = {b: relabel(lambda a: a, g, t) for b, t in first.s.items()}
    s = {c: flatten(relabel(xi, lambda c: c, t)) for c, t in second.s.items()}
    embed = {a: g[b] for a, b in first.ctx.embed.items()}
    ctx = Context(dict(first.ctx.inputs), dict(second.ctx.nodes), embed)
    return AbstractTermGraph(first.sig, ctx, s)


def _check_boundary(c1: CospanTG, c2: CospanTG):
    if c1.target != c2.source:
        raise BoundaryMismatch(f"target {c1.target} of the first graph differs from source {c2.source} of the second")
    if c1.sig != c2.sig:
        raise BoundaryMismatch("graphs are over different signatures")


def compose(c1: CospanTG, c2: CospanTG, canonical: bool = True) -> CospanTG:
    """``c2 . c1`` by pushout of the middle legs.

    Acyclic bodies: push c2's coalgebra out along c1's output leg, then
    compose with c1's coalgebra.  Cyclic bodies (or mixed) use the step-map
    form, where pushing out is just renaming.
    """
    _check_boundary(c1, c2)
    Z, p, q = pushout(c1.out, c2.body.ctx.embed, c1.apex, c2.apex)
    out = {c: q[y] for c, y in c2.out.items()}
    if not c1.cyclic and not c2.cyclic:
        pushed = pushout_coalgebra(c2.body, c1.out, p, q, Z)
        body = compose_coalgebra(c1.body, pushed)
        result = CospanTG(body, out)
        if not isinstance(classify_coalgebra(abstract_to_cyclic(body)), Acyclic):
            raise CyclicInput("composite of acyclic graphs is cyclic")
    else:
        s1, s2 = as_cyclic(c1.body), as_cyclic(c2.body)
        step = {}
        for x, st in s1.step.items():
            step[p[x]] = st if isinstance(st, Var) else Op(st.op, tuple(p[w] for w in st.children))
        for y, st in s2.step.items():
            if isinstance(st, Op):
                step[q[y]] = Op(st.op, tuple(q[w] for w in st.children))
        embed = {a: p[x] for a, x in s1.ctx.embed.items()}
        body = CyclicCoalgebra(c1.sig, Context(c1.source, Z, embed), {z: step[z] for z in Z})
        result = CospanTG(body, out)
    return canonicalize(result) if canonical else result


# -- concrete view -----------------------------------------------------------

def graph_view(c: CospanTG):
    """Concrete presentation: (graph, outputs B -> A + V, apex bijection)."""
    g, bij = from_cyclic(c.body) if c.cyclic else from_abstract(c.body)
    return g, {b: bij[x] for b, x in c.out.items()}, bij


def to_graph(c: CospanTG):
    g, outputs, _ = graph_view(c)
    return g, outputs


def from_graph(g: ConcreteTermGraph, outputs: Mapping[str, str], cyclic: bool = False) -> CospanTG:
    body = to_cyclic(g) if cyclic else to_abstract(g)
    for b, x in outputs.items():
        if x not in body.ctx.nodes:
            raise UnknownElement(f"output {b!r} points at unknown node {x!r}")
    return CospanTG(body, dict(outputs))


def compose_concrete(c1: CospanTG, c2: CospanTG, canonical: bool = True) -> CospanTG:
    """Composite built directly on concrete graphs: internal nodes V + V',
    children of V' nodes redirected through g when they are inputs of the
    second graph, and outputs ``h(c) = g'(c)`` or ``g(g'(c))``."""
    _check_boundary(c1, c2)
    t1, g1 = to_graph(c1)
    t2, g2 = to_graph(c2)
    taken = set(t1.inputs) | set(t1.nodes)
    rename = {}
    for v in t2.nodes:
        name, n = v, 0
        while name in taken:
            n += 1
            name = f"{v}_{n}"
        taken.add(name)
        rename[v] = name

    def through(w):
        return rename[w] if w in t2.nodes else g1[w]

    nodes = dict(t1.nodes)
    for v, (op, kids) in t2.nodes.items():
        nodes[rename[v]] = (op, tuple(through(w) for w in kids))
    graph = make_graph(c1.sig, dict(t1.inputs), nodes)
    outputs = {c: through(x) for c, x in g2.items()}
    result = from_graph(graph, outputs, cyclic=c1.cyclic or c2.cyclic)
    return canonicalize(result) if canonical else result


# -- renaming ----------------------------------------------------------------

def rename_apex(c: CospanTG, k: Mapping[str, str]) -> CospanTG:
    """Transport ``c`` along a bijection of its apex."""
    body = c.body
    nodes = {k[x]: s for x, s in body.ctx.nodes.items()}
    ctx = Context(dict(body.ctx.inputs), nodes, {a: k[x] for a, x in body.ctx.embed.items()})
    if isinstance(body, CyclicCoalgebra):
        step = {
            k[x]: st if isinstance(st, Var) else Op(st.op, tuple(k[w] for w in st.children))
            for x, st in body.step.items()
        }
        new = CyclicCoalgebra(body.sig, ctx, step)
    else:
        new = AbstractTermGraph(body.sig, ctx, {k[x]: relabel(lambda a: a, k, t) for x, t in body.s.items()})
    return CospanTG(new, {b: k[x] for b, x in c.out.items()})


def rename_boundary(c: CospanTG, source: Mapping[str, str] | None = None, target: Mapping[str, str] | None = None) -> CospanTG:
    """Rename the variables (``source``) and output names (``target``)."""
    h = dict(source) if source is not None else _identity(c.source)
    body = c.body
    ctx = Context({h[a]: s for a, s in body.ctx.inputs.items()}, dict(body.ctx.nodes), {h[a]: x for a, x in body.ctx.embed.items()})
    if isinstance(body, CyclicCoalgebra):
        step = {x: Var(h[st.var]) if isinstance(st, Var) else st for x, st in body.step.items()}
        new = CyclicCoalgebra(body.sig, ctx, step)
    else:
        new = AbstractTermGraph(body.sig, ctx, {x: relabel(h, lambda b: b, t) for x, t in body.s.items()})
    out = c.out if target is None else {target[b]: x for b, x in c.out.items()}
    return CospanTG(new, dict(out))


def canonicalize(c: CospanTG) -> CospanTG:
    """Rename the apex: the node of variable a becomes ``a``; every other
    node becomes n0, n1, ... in post-order of a left-to-right depth-first
    walk from the outputs, then from any unreachable nodes."""
    steps = as_cyclic(c.body)
    inv = {x: a for a, x in steps.ctx.embed.items()}
    order, seen = [], set()

    def visit(x):
        stack = [(x, iter(steps.step[x].children if isinstance(steps.step[x], Op) else ()))]
        seen.add(x)
        while stack:
            node, kids = stack[-1]
            for w in kids:
                if w not in seen:
                    seen.add(w)
                    stack.append((w, iter(steps.step[w].children if isinstance(steps.step[w], Op) else ())))
                    break
            else:
                stack.pop()
                order.append(node)

    for x in c.out.values():
        if x not in seen:
            visit(x)
    for x in steps.ctx.nodes:
        if x not in seen:
            visit(x)
    k, i = {}, 0
    used = set(steps.ctx.inputs)
    for x in order:
        if x in inv:
            k[x] = inv[x]
            continue
        while f"n{i}" in used:
            i += 1
        k[x] = f"n{i}"
        i += 1
    renamed = rename_apex(c, k)
    # keep the apex in a stable order: variables first, then by new name
    body = renamed.body
    order = [*(body.ctx.embed[a] for a in body.ctx.inputs), *(k[x] for x in order if x not in inv)]
    ctx = Context(dict(body.ctx.inputs), {x: body.ctx.nodes[x] for x in order}, dict(body.ctx.embed))
    if isinstance(body, CyclicCoalgebra):
        body = CyclicCoalgebra(body.sig, ctx, {x: body.step[x] for x in order})
    else:
        body = AbstractTermGraph(body.sig, ctx, {x: body.s[x] for x in order})
    return CospanTG(body, dict(renamed.out))


# -- structure of the category -----------------------------------------------

def identity(A: Mapping[str, str], sig: Signature) -> CospanTG:
    """A -> A <- A with the unique coalgebra ``s(a) = [a]``."""
    A = dict(A)
    ctx = Context(A, dict(A), _identity(A))
    return CospanTG(AbstractTermGraph(sig, ctx, {a: Leaf(a) for a in A}), _identity(A))


def embed(f: Mapping[str, str], codomain: Mapping[str, str], sig: Signature) -> CospanTG:
    """The cospan B -> B <- A (legs 1_B and f) representing f: A -> B
    contravariantly, as a graph from B to A."""
    for a, b in f.items():
        if b not in codomain:
            raise UnknownElement(f"{a!r} maps outside the codomain")
    base = identity(codomain, sig)
    return CospanTG(base.body, dict(f))


def coproduct_names(left, right):
    """Injections into a disjoint union of two name sets.  Names are kept
    when the sets are disjoint; otherwise every name gets an ``l_``/``r_``
    prefix."""
    left, right = list(left), list(right)
    if set(left).isdisjoint(right):
        return _identity(left), _identity(right)
    return {x: f"l_{x}" for x in left}, {x: f"r_{x}" for x in right}


def tensor(c1: CospanTG, c2: CospanTG) -> CospanTG:
    """(A -> X <- B) + (A' -> X' <- B'), componentwise disjoint union."""
    if c1.sig != c2.sig:
        raise BoundaryMismatch("graphs are over different signatures")
    ia, ja = coproduct_names(c1.source, c2.source)
    ix, jx = coproduct_names(c1.apex, c2.apex)
    ib, jb = coproduct_names(c1.out, c2.out)
    inputs = {**{ia[a]: s for a, s in c1.source.items()}, **{ja[a]: s for a, s in c2.source.items()}}
    nodes = {**{ix[x]: s for x, s in c1.apex.items()}, **{jx[x]: s for x, s in c2.apex.items()}}
    emb = {**{ia[a]: ix[x] for a, x in c1.body.ctx.embed.items()}, **{ja[a]: jx[x] for a, x in c2.body.ctx.embed.items()}}
    ctx = Context(inputs, nodes, emb)
    out = {**{ib[b]: ix[x] for b, x in c1.out.items()}, **{jb[b]: jx[x] for b, x in c2.out.items()}}
    if c1.cyclic or c2.cyclic:
        step = {}
        for (i_a, i_x), c in (((ia, ix), c1), ((ja, jx), c2)):
            for x, st in as_cyclic(c.body).step.items():
                step[i_x[x]] = Var(i_a[st.var]) if isinstance(st, Var) else Op(st.op, tuple(i_x[w] for w in st.children))
        return CospanTG(CyclicCoalgebra(c1.sig, ctx, step), out)
    s = {}
    for (i_a, i_x), c in (((ia, ix), c1), ((ja, jx), c2)):
        for x, t in c.body.s.items():
            s[i_x[x]] = relabel(i_a, i_x, t)
    return CospanTG(AbstractTermGraph(c1.sig, ctx, s), out)


def equiv(c1: CospanTG, c2: CospanTG) -> Optional[dict]:
    """An apex bijection witnessing ``c1 ~ c2``, or None.

    The bijection must commute with both legs and be a coalgebra map.
    Variables and outputs fix part of it; matching children propagates
    further, and the rest is found by backtracking over nodes with the same
    operation.
    """
    if c1.source != c2.source or c1.target != c2.target or c1.sig != c2.sig:
        return None
    if len(c1.apex) != len(c2.apex):
        return None
    s1, s2 = as_cyclic(c1.body), as_cyclic(c2.body)
    sort1, sort2 = s1.ctx.nodes, s2.ctx.nodes

    def assign(lam, used, x, y, todo):
        if x in lam:
            return lam[x] == y
        if y in used or sort1[x] != sort2[y]:
            return False
        lam[x] = y
        used.add(y)
        todo.append(x)
        return True

    def propagate(lam, used, todo):
        while todo:
            x = todo.pop()
            a, b = s1.step[x], s2.step[lam[x]]
            if isinstance(a, Var) or isinstance(b, Var):
                if a != b:
                    return False
                continue
            if a.op != b.op or len(a.children) != len(b.children):
                return False
            for u, v in zip(a.children, b.children):
                if not assign(lam, used, u, v, todo):
                    return False
        return True

    lam, used, todo = {}, set(), []
    pairs = [(s1.ctx.embed[a], s2.ctx.embed[a]) for a in s1.ctx.embed]
    pairs += [(c1.out[b], c2.out[b]) for b in c1.out]
    for x, y in pairs:
        if not assign(lam, used, x, y, todo):
            return None
    if not propagate(lam, used, todo):
        return None

    order1 = list(sort1)

    def search(lam, used):
        free = [x for x in order1 if x not in lam]
        if not free:
            return lam
        x = free[0]
        for y in sort2:
            if y in used or sort2[y] != sort1[x]:
                continue
            a, b = s1.step[x], s2.step[y]
            if type(a) is not type(b) or isinstance(a, Op) and a.op != b.op:
                continue
            lam2, used2, todo = dict(lam), set(used), []
            if assign(lam2, used2, x, y, todo) and propagate(lam2, used2, todo):
                found = search(lam2, used2)
                if found is not None:
                    return found
        return None

    lam = search(lam, used)
    if lam is None:
        return None
    h = _identity(c1.source)
    if c1.cyclic or c2.cyclic:
        ok = check_cyclic_morphism(s1, s2, h, lam).ok
    else:
        ok = check_atg_morphism(c1.body, c2.body, h, lam).ok
    assert ok, "equivalence witness is not a coalgebra map"
    return lam


def interpret_cospan(c: CospanTG, env: Mapping, alg: Algebra) -> dict:
    """Extend ``env`` over the apex and restrict along the output leg."""
    if c.cyclic:
        values = solve_cyclic(c.body, env, alg)
    else:
        values = lift(c.body, env, alg).values
    return {b: values[x] for b, x in c.out.items()}
