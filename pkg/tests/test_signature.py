import pytest

from termgraph.errors import DuplicateName, ParseError, UnknownOp, UnknownSort
from termgraph.signature import (
    DEFAULT_SORT,
    format_signature,
    functor_elements,
    make_signature,
    parse_signature,
    single_sorted,
)

from generators import SIGMA0


def test_sigma0_arities():
    assert SIGMA0.sorts == (DEFAULT_SORT,)
    assert {op.name: op.arity for op in SIGMA0.ops} == {"α": 0, "β": 0, "+": 2, "*": 2}
    assert SIGMA0.single_sorted


def test_many_sorted_op_lookup():
    sig = make_signature(["nat", "bool"], [("zero", (), "nat"), ("le", ("nat", "nat"), "bool")])
    assert sig.op("le").inputs == ("nat", "nat")
    assert sig.op("le").output == "bool"
    assert not sig.single_sorted
    with pytest.raises(UnknownOp):
        sig.op("succ")


def test_validation():
    with pytest.raises(DuplicateName):
        make_signature(["s", "s"], [])
    with pytest.raises(DuplicateName):
        make_signature(["s"], [("f", (), "s"), ("f", ("s",), "s")])
    with pytest.raises(UnknownSort):
        make_signature(["s"], [("f", ("t",), "s")])
    with pytest.raises(ValueError):
        make_signature(["bad sort"], [])


def test_functor_on_finite_family():
    # F(X) for X = {p, q}: two constants, and 2*2 pairs for each binary op
    elements = functor_elements(SIGMA0, {DEFAULT_SORT: ["p", "q"]})
    assert len(elements[DEFAULT_SORT]) == 2 + 4 + 4
    assert ("+", ("p", "q")) in elements[DEFAULT_SORT]
    assert ("α", ()) in elements[DEFAULT_SORT]


def test_functor_empty_family_keeps_constants():
    assert functor_elements(SIGMA0, {}) == {DEFAULT_SORT: {("α", ()), ("β", ())}}


def test_text_round_trip():
    text = format_signature(SIGMA0)
    assert parse_signature(text) == SIGMA0
    sig = make_signature(["s", "t"], [("a b", ("s",), "t"), ("op", (), "s"), ('q"', ("t", "s"), "s")])
    assert parse_signature(format_signature(sig)) == sig


def test_parse_unicode_and_quoted():
    sig = parse_signature('sort term;\nop α : () -> term;\nop "+" : (term, term) -> term;\n')
    assert [op.name for op in sig.ops] == ["α", "+"]


@pytest.mark.parametrize(
    "text, where",
    [
        ("sort s;\nop f : s -> s;", "2:"),
        ("sorts s;", "1:1"),
        ("sort s; op f : (s) s;", "1:"),
    ],
)
def test_parse_errors_carry_location(text, where):
    with pytest.raises(ParseError) as e:
        parse_signature(text)
    assert str(e.value).startswith(where)


def test_single_sorted_helper():
    sig = single_sorted({"succ": 1, "zero": 0}, sort="nat")
    assert sig.op("succ").inputs == ("nat",)


def test_merge_signatures():
    from termgraph.signature import merge_signatures

    a = single_sorted({"+": 2, "α": 0})
    b = single_sorted({"+": 2, "succ": 1})
    merged = merge_signatures(a, b)
    assert [op.name for op in merged.ops] == ["+", "α", "succ"]
    with pytest.raises(DuplicateName):
        merge_signatures(a, single_sorted({"+": 1}))
