import random

import pytest
from hypothesis import given, settings, strategies as st

from termgraph.coalgebra import (
    AbstractTermGraph,
    CyclicCoalgebra,
    Op,
    Var,
    abstract_to_cyclic,
    check_atg_morphism,
    check_cyclic_morphism,
    classify_coalgebra,
    cyclic_to_abstract,
    from_abstract,
    from_cyclic,
    max_depth,
    to_abstract,
    to_cyclic,
    unfold,
    validate_atg,
)
from termgraph.errors import ArityMismatch, CyclicInput, LawViolation, SortMismatch, UnknownElement
from termgraph.graphs import Acyclic, Cyclic, make_graph
from termgraph.trees import Context, Cut, Leaf, Node, is_prefix, render

from generators import SIGMA0, random_graph, random_signature

T = "term"


def open_example():
    return make_graph(SIGMA0, ["x", "y"], {"1": ("+", ("x", "y")), "2": ("*", ("x", "1"))})


def test_open_example_trees():
    atg = to_abstract(open_example())
    assert {b: render(t) for b, t in atg.s.items()} == {
        "x": "[x]",
        "y": "[y]",
        "1": "+_1([x],[y])",
        "2": "*_2([x],+_1([x],[y]))",
    }
    assert validate_atg(atg.sig, atg.ctx, atg.s).ok


def test_validate_reports_each_law():
    ctx = Context({"x": T}, {"x": T, "1": T, "2": T}, {"x": "x"})
    good = {"x": Leaf("x"), "1": Node("1", "α", ()), "2": Node("2", "+", (Leaf("x"), Node("1", "α", ())))}
    assert validate_atg(SIGMA0, ctx, good).ok

    wrong_root = dict(good, **{"1": Node("2", "α", ())})
    report = validate_atg(SIGMA0, ctx, wrong_root)
    assert report.failed("counit")

    # s(2) claims node 1 is β but s(1) says α
    incoherent = dict(good, **{"2": Node("2", "+", (Leaf("x"), Node("1", "β", ())))})
    report = validate_atg(SIGMA0, ctx, incoherent)
    assert report.failed("comultiplication") and not report.failed("counit")
    assert "at 2" in str(report)

    not_leaf = dict(good, **{"x": Node("x", "α", ())})
    assert validate_atg(SIGMA0, ctx, not_leaf).failed("leaf")


def test_validate_raises_on_malformed():
    ctx = Context({"x": T}, {"x": T, "1": T}, {"x": "x"})
    with pytest.raises(UnknownElement):
        validate_atg(SIGMA0, ctx, {"x": Leaf("x")})
    with pytest.raises(ArityMismatch):
        validate_atg(SIGMA0, ctx, {"x": Leaf("x"), "1": Node("1", "+", (Leaf("x"),))})


def test_report_summary_text():
    atg = to_abstract(open_example())
    assert atg.validate().summary() == "counit: ok, comultiplication: ok, leaf: ok"


def test_from_abstract_rejects_invalid():
    ctx = Context({}, {"1": T, "2": T}, {})
    with pytest.raises(LawViolation) as e:
        from_abstract(AbstractTermGraph(SIGMA0, ctx, {"1": Node("2", "α", ()), "2": Node("2", "α", ())}))
    assert not e.value.report.ok


def test_from_abstract_renames_clashing_nodes():
    # a node named like a variable, with the variable embedded elsewhere
    ctx = Context({"x": T}, {"b": T, "x": T}, {"x": "b"})
    atg = AbstractTermGraph(SIGMA0, ctx, {"b": Leaf("x"), "x": Node("x", "+", (Leaf("x"), Leaf("x")))})
    g, bij = from_abstract(atg)
    assert bij == {"b": "x", "x": "x_1"}
    assert g.nodes == {"x_1": ("+", ("x", "x"))}


def test_non_injective_embedding():
    # two variables at one node: allowed for coalgebras on arbitrary f
    ctx = Context({"x": T, "y": T}, {"b": T}, {"x": "b", "y": "b"})
    report = validate_atg(SIGMA0, ctx, {"b": Leaf("x")})
    assert report.failed("leaf")


def test_to_abstract_rejects_cycles():
    g = make_graph(SIGMA0, [], {"b": ("+", ("b", "b"))})
    with pytest.raises(CyclicInput):
        to_abstract(g)


def test_atg_morphism_square_and_sorts():
    src = to_abstract(make_graph(SIGMA0, ["x"], {"1": ("+", ("x", "x"))}))
    dst = to_abstract(make_graph(SIGMA0, ["y"], {"a": ("+", ("y", "y")), "b": ("α", ())}))
    assert check_atg_morphism(src, dst, {"x": "y"}, {"x": "y", "1": "a"}).ok
    assert check_atg_morphism(src, dst, {"x": "y"}, {"x": "a", "1": "a"}).failed("square")
    assert check_atg_morphism(src, dst, {"x": "y"}, {"x": "y", "1": "b"}).failed("coalgebra")


def test_loop_unfold():
    c = CyclicCoalgebra(SIGMA0.__class__((T,), (SIGMA0.op("α").__class__("succ", (T,), T),)), Context({}, {"b": T}, {}), {"b": Op("succ", ("b",))})
    assert render(unfold(c, "b", 3)) == "succ_b(succ_b(succ_b(<cut b>)))"
    assert unfold(c, "b", 0) == Cut("b")
    assert classify_coalgebra(c) == Cyclic(("b",))
    with pytest.raises(CyclicInput):
        cyclic_to_abstract(c)
    with pytest.raises(ValueError):
        unfold(c, "b", -1)


def test_validate_cyclic():
    ctx = Context({"x": T}, {"x": T, "v": T}, {"x": "x"})
    assert CyclicCoalgebra(SIGMA0, ctx, {"x": Var("x"), "v": Op("+", ("v", "x"))}).validate().ok
    assert CyclicCoalgebra(SIGMA0, ctx, {"x": Op("α"), "v": Op("+", ("v", "x"))}).validate().failed("leaf")
    assert CyclicCoalgebra(SIGMA0, ctx, {"x": Var("x"), "v": Var("x")}).validate().failed("leaf")
    with pytest.raises(ArityMismatch):
        CyclicCoalgebra(SIGMA0, ctx, {"x": Var("x"), "v": Op("+", ("v",))}).validate()
    with pytest.raises(UnknownElement):
        CyclicCoalgebra(SIGMA0, ctx, {"x": Var("x"), "v": Op("+", ("v", "w"))}).validate()


def test_cyclic_morphism():
    ctx = Context({}, {"b": T}, {})
    one = CyclicCoalgebra(SIGMA0, ctx, {"b": Op("+", ("b", "b"))})
    ctx2 = Context({}, {"p": T, "q": T}, {})
    two = CyclicCoalgebra(SIGMA0, ctx2, {"p": Op("+", ("q", "p")), "q": Op("+", ("p", "q"))})
    # two collapses onto one, not the other way round
    assert check_cyclic_morphism(two, one, {}, {"p": "b", "q": "b"}).ok
    assert check_cyclic_morphism(one, two, {}, {"b": "p"}).failed("coalgebra")


def many_sorted_graph(seed, cyclic=False):
    rng = random.Random(seed)
    sig = random_signature(rng) if seed % 2 else SIGMA0
    return random_graph(rng, sig, cyclic=cyclic)


@settings(max_examples=150)
@given(st.integers(0, 10**9))
def test_unfold_is_prefix_of_deeper_unfold(seed):
    g = many_sorted_graph(seed, cyclic=True)
    c = to_cyclic(g)
    for b in c.ctx.nodes:
        assert is_prefix(unfold(c, b, 2), unfold(c, b, 4))


@settings(max_examples=150)
@given(st.integers(0, 10**9))
def test_abstract_cyclic_translations_agree(seed):
    g = many_sorted_graph(seed)
    atg = to_abstract(g)
    c = abstract_to_cyclic(atg)
    assert c == to_cyclic(g)
    assert cyclic_to_abstract(c) == atg
    assert isinstance(classify_coalgebra(c), Acyclic)
    assert from_cyclic(c)[0] == g


def test_max_depth():
    assert max_depth(to_abstract(open_example())) == 2
    assert max_depth(to_abstract(make_graph(SIGMA0, [], {}))) == 0


def test_sort_mismatch_in_cyclic_step():
    from termgraph.signature import make_signature

    sig = make_signature(["n", "b"], [("z", (), "n"), ("t", (), "b")])
    with pytest.raises(SortMismatch):
        CyclicCoalgebra(sig, Context({}, {"v": "b"}, {}), {"v": Op("z")}).validate()
