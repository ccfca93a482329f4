"""``tg``: command-line front end.

Files are either let-programs (optionally opening with a ``signature { }``
block) or JSON graph documents; the format is sniffed from the first
character.  Exit status: 0 success, 1 law violation or failed check,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import cospan as cs
from .coalgebra import abstract_to_cyclic, classify_coalgebra, cyclic_to_abstract, unfold
from .errors import TermGraphError, Unsolvable
from .formats import cospan_document, cospan_from_document, to_dot
from .graphs import Cyclic
from .letlang import elaborate, parse_file, print_let, to_program
from .semantics import arithmetic_algebra, lift, solve_cyclic
from .signature import merge_signatures, parse_signature
from .trees import relabel, render


class UsageError(Exception):
    pass


def load(path, sig=None) -> cs.CospanTG:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return cospan_from_document(text, sig)
    inline, program = parse_file(text)
    return elaborate(program, inline or sig)


def dump(c: cs.CospanTG, fmt: str) -> str:
    match fmt:
        case "let":
            return print_let(to_program(c))
        case "graph":
            return cospan_document(c)
        case "abstract":
            return cospan_document(c, abstract=True)
        case "dot":
            g, outputs = cs.to_graph(c)
            return to_dot(g, outputs)
    raise UsageError(f"unknown format {fmt!r}")


def _format_for(path: str) -> str:
    suffix = Path(path).suffix
    return {".json": "graph", ".dot": "dot"}.get(suffix, "let")


def _write(text, out, stdout):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


def _pairs(items):
    """Parse ``k=v,k=v`` (repeatable) into a dict."""
    out = {}
    for item in items or []:
        for part in item.split(","):
            if not part.strip():
                continue
            key, sep, value = part.partition("=")
            if not sep:
                raise UsageError(f"expected name=value, got {part!r}")
            out[key.strip()] = value.strip()
    return out


def _number(kind, text):
    try:
        return int(text) if kind == "int" else Fraction(text)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def _show(value) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        if value.denominator <= 10**6:
            return str(value)
        return f"{float(value):.12g}"
    return str(value)


def _algebra(args, c):
    consts = {k: _number(args.algebra, v) for k, v in _pairs(args.const).items()}
    ops = _pairs(args.op)
    tol = float(Fraction(args.tol)) if getattr(args, "tol", None) else 1e-9
    return arithmetic_algebra(
        c.sig,
        args.algebra,
        consts,
        ops,
        bottom=_number(args.algebra, getattr(args, "bottom", "0") or "0"),
        max_iterations=getattr(args, "max_iter", 10_000),
        tolerance=tol,
    )


def _env(args, c):
    raw = _pairs(args.env)
    env = {a: _number(args.algebra, v) for a, v in raw.items()}
    missing = set(c.source) - set(env)
    if missing:
        raise UsageError(f"no value for inputs {sorted(missing)} (use --env)")
    return env


def _named_values(c, values):
    """Values keyed by output name, or by node name when there are no outputs."""
    if c.out:
        return {b: values[x] for b, x in c.out.items()}
    _, _, bij = cs.graph_view(c)
    return {bij[x]: v for x, v in values.items()}


# -- commands ----------------------------------------------------------------

def cmd_validate(args, c, stdout):
    g, _ = cs.to_graph(c)
    kind = classify_coalgebra(cs.as_cyclic(c.body))
    shape = f"cyclic (cycle through {', '.join(kind.witness)})" if isinstance(kind, Cyclic) else "acyclic"
    stdout.write(f"ok: {shape}, {len(g.inputs)} inputs, {len(g.nodes)} internal nodes, {len(c.out)} outputs\n")
    return 0


def cmd_laws(args, c, stdout):
    report = c.body.validate()
    stdout.write(str(report) + "\n")
    return 0 if report.ok else 1


def cmd_convert(args, c, stdout):
    _write(dump(c, args.to), args.output, stdout)
    return 0


def _common(c1, c2):
    """Bring two graphs over one signature (files without a signature block
    each infer their own)."""
    if c1.sig == c2.sig:
        return c1, c2
    sig = merge_signatures(c1.sig, c2.sig)
    return cs.with_signature(c1, sig), cs.with_signature(c2, sig)


def _binary(op):
    def run(args, sig, stdout):
        c1, c2 = _common(load(args.first, sig), load(args.second, sig))
        result = op(c1, c2)
        fmt = args.to or (_format_for(args.output) if args.output else "let")
        _write(dump(result, fmt), args.output, stdout)
        return 0

    return run


def cmd_equiv(args, sig, stdout):
    c1, c2 = _common(load(args.first, sig), load(args.second, sig))
    witness = cs.equiv(c1, c2)
    if witness is None:
        stdout.write("not equivalent\n")
        return 1
    _, _, bij1 = cs.graph_view(c1)
    _, _, bij2 = cs.graph_view(c2)
    stdout.write("equivalent\n")
    for x, y in witness.items():
        stdout.write(f"  {bij1[x]} -> {bij2[y]}\n")
    return 0


def cmd_eval(args, c, stdout):
    alg = _algebra(args, c)
    env = _env(args, c)
    if c.cyclic:
        if isinstance(classify_coalgebra(c.body), Cyclic):
            raise UsageError("graph is cyclic; use 'tg solve'")
        c = cs.CospanTG(cyclic_to_abstract(c.body), c.out)
    values, count = lift(c.body, env, alg)
    for name, v in _named_values(c, values).items():
        stdout.write(f"{name} = {_show(v)} ({count} op applications)\n")
    return 0


def cmd_solve(args, c, stdout):
    alg = _algebra(args, c)
    env = _env(args, c)
    body = c.body if c.cyclic else abstract_to_cyclic(c.body)
    try:
        values = solve_cyclic(body, env, alg)
    except Unsolvable as e:
        stdout.write(f"unsolvable: {e}\n")
        return 1
    for name, v in _named_values(c, values).items():
        stdout.write(f"{name} = {_show(v)}\n")
    return 0


def cmd_unfold(args, c, stdout):
    _, _, bij = cs.graph_view(c)
    back = {v: x for x, v in bij.items()}
    if args.node not in back:
        raise UsageError(f"unknown node {args.node!r}")
    steps = cs.as_cyclic(c.body)
    tree = unfold(steps, back[args.node], args.depth)
    stdout.write(render(relabel(lambda a: a, bij, tree)) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tg", description="Term graphs with sharing.")
    parser.add_argument("--sig", help="signature file (sort/op declarations)")
    sub = parser.add_subparsers(dest="command", required=True)

    def single(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("file")
        p.set_defaults(run=fn, single=True)
        return p

    def algebra_flags(p):
        p.add_argument("--algebra", choices=["int", "rat"], default="int")
        p.add_argument("--const", action="append", help="nullary operations, e.g. α=2,β=3")
        p.add_argument("--op", action="append", help="operations as expressions, e.g. h=x/2+1")
        p.add_argument("--env", action="append", help="input values, e.g. x=2,y=3")

    single("validate", cmd_validate, "check well-formedness and classify")
    single("laws", cmd_laws, "check the coalgebra laws")
    p = single("convert", cmd_convert, "convert between formats")
    p.add_argument("--to", choices=["let", "graph", "abstract", "dot"], required=True)
    p.add_argument("-o", "--output")
    p = single("eval", cmd_eval, "evaluate an acyclic graph")
    algebra_flags(p)
    p = single("solve", cmd_solve, "solve a (possibly cyclic) graph by fixpoint iteration")
    algebra_flags(p)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--tol", default="1e-9")
    p.add_argument("--bottom", default="0")
    p = single("unfold", cmd_unfold, "unfold a node to bounded depth")
    p.add_argument("--node", required=True)
    p.add_argument("--depth", type=int, required=True)

    for name, fn, help in (
        ("compose", _binary(cs.compose), "compose F then G"),
        ("tensor", _binary(cs.tensor), "parallel composition"),
        ("equiv", cmd_equiv, "decide equivalence"),
    ):
        p = sub.add_parser(name, help=help)
        p.add_argument("first")
        p.add_argument("second")
        if name != "equiv":
            p.add_argument("-o", "--output")
            p.add_argument("--to", choices=["let", "graph", "abstract", "dot"])
        p.set_defaults(run=fn, single=False)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        sig = parse_signature(Path(args.sig).read_text(encoding="utf-8")) if args.sig else None
        if args.single:
            return args.run(args, load(args.file, sig), stdout)
        return args.run(args, sig, stdout)
    except (TermGraphError, UsageError, OSError, ValueError) as e:
        stderr.write(f"tg: error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
