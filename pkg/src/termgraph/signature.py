"""Many-sorted signatures and the signature endofunctor on finite families."""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import DuplicateName, ParseError, UnknownOp, UnknownSort

IDENT = re.compile(r"[A-Za-z0-9_]+")
DEFAULT_SORT = "term"


@dataclass(frozen=True)
class OpSym:
    name: str
    inputs: tuple[str, ...]
    output: str

    @property
    def arity(self) -> int:
        return len(self.inputs)


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...]
    ops: tuple[OpSym, ...]

    def __post_init__(self):
        object.__setattr__(self, "_by_name", {op.name: op for op in self.ops})

    def op(self, name: str) -> OpSym:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownOp(f"unknown operation {name!r}") from None

    def has_op(self, name: str) -> bool:
        return name in self._by_name

    @property
    def single_sorted(self) -> bool:
        return len(self.sorts) == 1


def make_signature(sorts: Iterable[str], ops: Iterable[tuple]) -> Signature:
    """Build a validated signature from sort names and ``(name, inputs, output)`` triples."""
    sorts = tuple(sorts)
    seen = set()
    for s in sorts:
        if not isinstance(s, str) or not IDENT.fullmatch(s):
            raise ValueError(f"invalid sort name {s!r}")
        if s in seen:
            raise DuplicateName(f"duplicate sort {s!r}")
        seen.add(s)
    built = []
    names = set()
    for name, inputs, output in ops:
        if name in names:
            raise DuplicateName(f"duplicate operation {name!r}")
        names.add(name)
        for s in (*inputs, output):
            if s not in seen:
                raise UnknownSort(f"operation {name!r} mentions unknown sort {s!r}")
        built.append(OpSym(name, tuple(inputs), output))
    return Signature(sorts, tuple(built))


def merge_signatures(first: Signature, second: Signature) -> Signature:
    """Union of two signatures; an operation declared in both must agree."""
    sorts = list(first.sorts) + [x for x in second.sorts if x not in first.sorts]
    ops = list(first.ops)
    for op in second.ops:
        if first.has_op(op.name):
            if first.op(op.name) != op:
                raise DuplicateName(f"operation {op.name!r} is declared differently in the two signatures")
        else:
            ops.append(op)
    return make_signature(sorts, [(op.name, op.inputs, op.output) for op in ops])


def single_sorted(ops: Mapping[str, int], sort: str = DEFAULT_SORT) -> Signature:
    """Single-sorted signature from an ``{op name: arity}`` table."""
    return make_signature([sort], [(n, (sort,) * k, sort) for n, k in ops.items()])


def functor_elements(sig: Signature, family: Mapping[str, Iterable]) -> dict[str, set]:
    """Materialize F_Sigma(X) as ``{sort: {(op name, args)}}``.

    Meant for test oracles; the size is exponential in arity.
    """
    for s in family:
        if s not in sig.sorts:
            raise UnknownSort(f"unknown sort {s!r}")
    carrier = {s: sorted(family.get(s, ()), key=repr) for s in sig.sorts}
    out: dict[str, set] = {s: set() for s in sig.sorts}
    for op in sig.ops:
        for args in itertools.product(*(carrier[s] for s in op.inputs)):
            out[op.output].add((op.name, args))
    return out


# -- text format -------------------------------------------------------------

_SIG_TOKEN = re.compile(
    r"""\s*(?:(?P<str>"(?:[^"\\]|\\.)*")|(?P<arrow>->)|(?P<punct>[;:(),{}])|(?P<word>[^\s;:(),{}"]+))"""
)


def _tokens(text: str):
    pos = 0
    line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def where(p):
        line = max(i for i, start in enumerate(line_starts) if start <= p)
        return line + 1, p - line_starts[line] + 1

    while True:
        m = _SIG_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:]
            if rest.strip():
                raise ParseError("unexpected character", *where(pos + len(rest) - len(rest.lstrip())))
            return
        pos = m.end()
        kind = m.lastgroup
        value = m.group(kind)
        at = where(m.start(kind))
        if kind == "str":
            value = json.loads(value)
            kind = "word"
        yield kind, value, at


def parse_signature(text: str) -> Signature:
    """Parse lines of ``sort <name>;`` and ``op <name> : (<sort>,...) -> <sort>;``."""
    toks = list(_tokens(text))
    i = 0

    def take(expected=None):
        nonlocal i
        if i >= len(toks):
            raise ParseError(f"unexpected end of signature (expected {expected})")
        kind, value, (ln, col) = toks[i]
        if expected is not None and value != expected and kind != expected:
            raise ParseError(f"expected {expected!r}, found {value!r}", ln, col)
        i += 1
        return value

    def peek():
        return toks[i][1] if i < len(toks) else None

    sorts, ops = [], []
    while i < len(toks):
        kw = take("word")
        if kw == "sort":
            sorts.append(take("word"))
            take(";")
        elif kw == "op":
            name = take("word")
            take(":")
            take("(")
            inputs = []
            if peek() != ")":
                inputs.append(take("word"))
                while peek() == ",":
                    take(",")
                    inputs.append(take("word"))
            take(")")
            take("->")
            output = take("word")
            take(";")
            ops.append((name, inputs, output))
        else:
            ln, col = toks[i - 1][2]
            raise ParseError(f"expected 'sort' or 'op', found {kw!r}", ln, col)
    return make_signature(sorts, ops)


def _quote_op(name: str) -> str:
    if re.fullmatch(r"[^\s;:(),{}\"]+", name) and name not in ("sort", "op", "->"):
        return name
    return json.dumps(name, ensure_ascii=False)


def format_signature(sig: Signature) -> str:
    lines = [f"sort {s};" for s in sig.sorts]
    for op in sig.ops:
        lines.append(f"op {_quote_op(op.name)} : ({','.join(op.inputs)}) -> {op.output};")
    return "\n".join(lines) + "\n"
