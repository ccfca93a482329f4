"""The let/letrec notation for term graphs.

Grammar::

    file     := ("signature" "{" <signature text> "}")? program
    program  := "inputs" inputs? ";" binding* "outputs" outputs? ";"
    inputs   := ident (":" sort)? ("," ident (":" sort)?)*
    binding  := ("let" | "letrec") ident (":" sort)? "=" op "(" idlist? ")" ";"
    outputs  := output ("," output)*
    output   := ident ("=" ident)?
    op       := ident | string

The keyword of the first binding fixes the mode for the whole program.  In
``let`` mode arguments may only mention inputs and earlier bindings.  Names
are never shadowed.  ``#`` starts a comment.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Optional

from .cospan import CospanTG, from_graph, to_graph
from .errors import ArityMismatch, ForwardReference, ParseError, SortMismatch, UnknownName, UnknownSort
from .graphs import classify, Acyclic, make_graph
from .signature import Signature, make_signature, parse_signature, DEFAULT_SORT

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
KEYWORDS = {"inputs", "let", "letrec", "outputs", "signature"}

_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r\n]+|\#[^\n]*)|(?P<str>"(?:[^"\\\n]|\\.)*")|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[;:,()=])"""
)


@dataclass(frozen=True)
class Binding:
    name: str
    op: str
    args: tuple[str, ...] = ()
    sort: Optional[str] = None


@dataclass(frozen=True)
class LetProgram:
    inputs: tuple[tuple[str, Optional[str]], ...]
    bindings: tuple[Binding, ...]
    outputs: tuple[tuple[str, str], ...]
    recursive: bool = False


@dataclass(frozen=True)
class _Tok:
    kind: str
    value: str
    line: int
    col: int


def _tokenize(text: str, line0: int = 1, col0: int = 1):
    toks = []
    pos, line, col = 0, line0, col0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            if kind == "str":
                value = json.loads(value)
            elif kind == "ident" and value in KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, value, line, col))
        nl = m.group().count("\n")
        if nl:
            line += nl
            col = len(m.group()) - m.group().rfind("\n")
        else:
            col += len(m.group())
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg, tok=None, cls=ParseError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col)

    def expect(self, kind, value=None):
        tok = self.tok
        if tok.kind != kind or value is not None and tok.value != value:
            want = value or kind
            raise self.error(f"expected {want!r}, found {tok.value or tok.kind!r}")
        self.i += 1
        return tok

    def accept(self, kind, value=None):
        tok = self.tok
        if tok.kind == kind and (value is None or tok.value == value):
            self.i += 1
            return tok
        return None

    def program(self) -> LetProgram:
        self.expect("kw", "inputs")
        inputs, seen = [], {}
        if not self.accept("punct", ";"):
            while True:
                tok = self.expect("ident")
                sort = self.expect("ident").value if self.accept("punct", ":") else None
                if tok.value in seen:
                    raise self.error(f"duplicate name {tok.value!r}", tok)
                seen[tok.value] = tok
                inputs.append((tok.value, sort))
                if self.accept("punct", ";"):
                    break
                self.expect("punct", ",")
        bindings, mode = [], None
        while self.tok.kind == "kw" and self.tok.value in ("let", "letrec"):
            kw = self.expect("kw")
            if mode is None:
                mode = kw.value
            elif kw.value != mode:
                raise self.error(f"{kw.value!r} in a {mode!r} program", kw)
            name = self.expect("ident")
            if name.value in seen:
                raise self.error(f"duplicate name {name.value!r}", name)
            sort = self.expect("ident").value if self.accept("punct", ":") else None
            self.expect("punct", "=")
            op = self.tok
            if op.kind not in ("ident", "str"):
                raise self.error(f"expected an operation, found {op.value or op.kind!r}")
            self.i += 1
            self.expect("punct", "(")
            args = []
            if not self.accept("punct", ")"):
                while True:
                    args.append(self.expect("ident"))
                    if self.accept("punct", ")"):
                        break
                    self.expect("punct", ",")
            self.expect("punct", ";")
            seen[name.value] = name
            bindings.append((Binding(name.value, op.value, tuple(a.value for a in args), sort), args))
        recursive = mode == "letrec"
        self.expect("kw", "outputs")
        outputs, out_names = [], set()
        if not self.accept("punct", ";"):
            while True:
                tok = self.expect("ident")
                target = self.expect("ident") if self.accept("punct", "=") else tok
                if tok.value in out_names:
                    raise self.error(f"duplicate output {tok.value!r}", tok)
                out_names.add(tok.value)
                outputs.append((tok, target))
                if self.accept("punct", ";"):
                    break
                self.expect("punct", ",")
        self.expect("eof")

        # name resolution
        defined = {a for a, _ in inputs}
        every = set(seen)
        for binding, arg_toks in bindings:
            for a in arg_toks:
                if a.value not in every:
                    raise self.error(f"unknown name {a.value!r}", a, UnknownName)
                if not recursive and a.value not in defined:
                    raise self.error(f"{a.value!r} is used before its binding", a, ForwardReference)
            defined.add(binding.name)
        for tok, target in outputs:
            if target.value not in every:
                raise self.error(f"unknown name {target.value!r}", target, UnknownName)
        return LetProgram(
            tuple(inputs),
            tuple(b for b, _ in bindings),
            tuple((t.value, x.value) for t, x in outputs),
            recursive,
        )


def parse_let(text: str) -> LetProgram:
    return _Parser(_tokenize(text)).program()


def split_signature(text: str):
    """Separate a leading ``signature { ... }`` block.

    Returns (signature text or None, program text, line and column where
    the program starts).
    """
    m = re.match(r"(\s|#[^\n]*)*signature\s*\{", text)
    if not m:
        return None, text, 1, 1
    depth, i, in_str = 1, m.end(), False
    while i < len(text) and depth:
        ch = text[i]
        if in_str:
            if ch == "\\":
                i += 1
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        i += 1
    if depth:
        raise ParseError("unterminated signature block")
    head = text[:i]
    line = head.count("\n") + 1
    col = i - head.rfind("\n")
    return text[m.end():i - 1], text[i:], line, col


def parse_file(text: str):
    """Parse a program file; returns (signature or None, program)."""
    sig_text, body, line, col = split_signature(text)
    sig = parse_signature(sig_text) if sig_text is not None else None
    program = _Parser(_tokenize(body, line, col)).program()
    return sig, program


# -- printing ----------------------------------------------------------------

def _op(name):
    return name if IDENT.fullmatch(name) and name not in KEYWORDS else json.dumps(name, ensure_ascii=False)


def print_let(p: LetProgram) -> str:
    inputs = ", ".join(a if s is None else f"{a}:{s}" for a, s in p.inputs)
    lines = [f"inputs {inputs};" if inputs else "inputs;"]
    kw = "letrec" if p.recursive else "let"
    for b in p.bindings:
        sort = f":{b.sort}" if b.sort else ""
        lines.append(f"{kw} {b.name}{sort} = {_op(b.op)}({', '.join(b.args)});")
    outs = ", ".join(b if b == x else f"{b} = {x}" for b, x in p.outputs)
    lines.append(f"outputs {outs};" if outs else "outputs;")
    return "\n".join(lines) + "\n"


# -- elaboration -------------------------------------------------------------

def infer_signature(p: LetProgram) -> Signature:
    """Single-sorted signature read off the arities used in ``p``."""
    arity = {}
    for b in p.bindings:
        if arity.setdefault(b.op, len(b.args)) != len(b.args):
            raise ArityMismatch(f"{b.op} used with {arity[b.op]} and {len(b.args)} arguments")
    sorts = {s for _, s in p.inputs if s} | {b.sort for b in p.bindings if b.sort}
    if len(sorts) > 1:
        raise SortMismatch("several sorts used but no signature given")
    sort = sorts.pop() if sorts else DEFAULT_SORT
    return make_signature([sort], [(op, (sort,) * n, sort) for op, n in arity.items()])


def elaborate(p: LetProgram, sig: Signature | None = None) -> CospanTG:
    """Inputs become variables, bindings internal nodes, outputs the output leg."""
    if sig is None:
        sig = infer_signature(p)
    ops = {b.name: sig.op(b.op) for b in p.bindings}
    for b in p.bindings:
        op = ops[b.name]
        if len(b.args) != op.arity:
            raise ArityMismatch(f"{b.name}: {op.name} expects {op.arity} arguments, got {len(b.args)}")
        if b.sort is not None and b.sort != op.output:
            raise SortMismatch(f"{b.name} is declared {b.sort} but {op.name} returns {op.output}")
    inputs = {}
    for a, s in p.inputs:
        if s is None:
            uses = {
                ops[b.name].inputs[i] for b in p.bindings for i, x in enumerate(b.args) if x == a
            }
            if sig.single_sorted:
                uses = {sig.sorts[0]}
            if len(uses) != 1:
                raise SortMismatch(f"cannot infer the sort of input {a!r}")
            s = uses.pop()
        if s not in sig.sorts:
            raise UnknownSort(f"unknown sort {s!r}")
        inputs[a] = s
    nodes = {b.name: (b.op, b.args) for b in p.bindings}
    g = make_graph(sig, inputs, nodes)
    return from_graph(g, dict(p.outputs), cyclic=p.recursive)


def _identifier_names(names, reserved=()):
    """Map arbitrary node names to distinct identifiers."""
    out, taken = {}, set(reserved)
    for n in names:
        base = n if IDENT.fullmatch(n) and n not in KEYWORDS else "v_" + re.sub(r"\W", "_", n)
        name, k = base, 0
        while name in taken:
            k += 1
            name = f"{base}_{k}"
        taken.add(name)
        out[n] = name
    return out


def to_program(c: CospanTG) -> LetProgram:
    """Let-notation for a cospan; acyclic bodies are listed in topological
    order, cyclic ones keep their node order under ``letrec``."""
    g, outputs = to_graph(c)
    rename = _identifier_names(g.inputs)
    rename.update(_identifier_names(g.nodes, reserved=rename.values()))
    many = not c.sig.single_sorted
    inputs = tuple((rename[a], s if many else None) for a, s in g.inputs.items())
    kind = classify(g)
    order = kind.order if isinstance(kind, Acyclic) and not c.cyclic else tuple(g.nodes)
    bindings = tuple(Binding(rename[v], g.label(v), tuple(rename[w] for w in g.children(v))) for v in order)
    for b in outputs:
        if not IDENT.fullmatch(b) or b in KEYWORDS:
            raise ValueError(f"output name {b!r} cannot be written in let notation")
    outs = tuple((b, rename[x]) for b, x in outputs.items())
    return LetProgram(inputs, bindings, outs, c.cyclic)
