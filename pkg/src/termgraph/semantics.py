"""Evaluation of trees and term graphs in algebras for a signature.

Node labels are semantically inert: evaluating ``op_b(z...)`` ignores ``b``
and applies the interpretation of ``op`` to the values of the children.
What a term graph adds over a tree is that a shared node is computed once.
"""

from __future__ import annotations

import ast
import numbers
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, NamedTuple, Optional

from .coalgebra import AbstractTermGraph, CyclicCoalgebra, Op, Var, classify_coalgebra, cyclic_to_abstract
from .errors import LawViolation, MissingSolver, UnknownElement, UnknownOp, Unsolvable
from .graphs import Acyclic
from .signature import Signature
from .trees import Leaf, Node, counit_root, depth


@dataclass(frozen=True)
class FixpointSolver:
    """Kleene-style iteration from ``bottom`` for cyclic graphs."""

    bottom: Mapping[str, Any]
    max_iterations: int = 10_000
    tolerance: float = 1e-9


def close(x, y, tol=0.0) -> bool:
    if isinstance(x, numbers.Number) and isinstance(y, numbers.Number):
        return abs(x - y) <= tol
    return x == y


@dataclass(frozen=True)
class Algebra:
    sig: Signature
    interp: Mapping[str, Callable]
    solver: Optional[FixpointSolver] = None
    equal: Callable[[Any, Any, float], bool] = field(default=close)

    def apply(self, op, args):
        try:
            fn = self.interp[op]
        except KeyError:
            raise UnknownOp(f"algebra does not interpret {op!r}") from None
        return fn(*args)


class Lifting(NamedTuple):
    values: dict
    applications: int


def eval_tree(alg: Algebra, env: Mapping, t):
    """The map ev: Pf -> C; leaves by ``env``, nodes by the algebra."""
    match t:
        case Leaf(a):
            try:
                return env[a]
            except KeyError:
                raise UnknownElement(f"no value for variable {a!r}") from None
        case Node(_, op, kids):
            return alg.apply(op, [eval_tree(alg, env, z) for z in kids])
    raise TypeError(f"not a tree: {t!r}")


def lift(atg: AbstractTermGraph, env: Mapping, alg: Algebra) -> Lifting:
    """Extend ``env`` along f to every node, one operation per internal node.

    Nodes are processed by increasing depth of their tree, so every child
    ``rho_f(z_i)`` is already valued.
    """
    ctx, s = atg.ctx, atg.s
    values = {}
    count = 0
    for b in sorted(ctx.nodes, key=lambda b: depth(s[b])):
        match s[b]:
            case Leaf(a):
                if a not in env:
                    raise UnknownElement(f"no value for variable {a!r}")
                values[b] = env[a]
            case Node(_, op, kids):
                values[b] = alg.apply(op, [values[counit_root(ctx, z)] for z in kids])
                count += 1
    return Lifting(values, count)


def solve_cyclic(c: CyclicCoalgebra, env: Mapping, alg: Algebra) -> dict:
    """Solve the guarded equations ``b = op(children)``, ``f(a) = env(a)``.

    Acyclic inputs are evaluated exactly via ``lift``.  Cyclic inputs need
    ``alg.solver``: all nodes are updated synchronously from the bottom
    element until two rounds agree within tolerance.  Neither complete
    iterativity of the algebra nor uniqueness of the fixpoint is checked.
    """
    report = c.validate()
    if not report.ok:
        raise LawViolation(report)
    if isinstance(classify_coalgebra(c), Acyclic):
        return lift(cyclic_to_abstract(c), env, alg).values
    solver = alg.solver
    if solver is None:
        raise MissingSolver("cyclic graph needs an algebra with a fixpoint solver")
    for a in c.ctx.inputs:
        if a not in env:
            raise UnknownElement(f"no value for variable {a!r}")

    def round_(old):
        new = {}
        for b, st in c.step.items():
            match st:
                case Var(a):
                    new[b] = env[a]
                case Op(op, kids):
                    new[b] = alg.apply(op, [old[w] for w in kids])
        return new

    values = {b: env[st.var] if isinstance(st, Var) else solver.bottom[c.ctx.nodes[b]] for b, st in c.step.items()}
    for _ in range(solver.max_iterations):
        try:
            new = round_(values)
        except (ArithmeticError, ValueError) as e:
            raise Unsolvable(f"iteration failed: {e}") from e
        if all(alg.equal(new[b], values[b], solver.tolerance) for b in new):
            return new
        values = new
    raise Unsolvable(f"no fixpoint within {solver.max_iterations} iterations")


# -- arithmetic algebras used by the CLI -------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
    ast.Pow: operator.pow,
}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def expression_op(expr: str, arity: int, number=Fraction) -> Callable:
    """Compile an arithmetic expression over ``x1..xn`` (``x``, ``y``, ``z``
    alias the first three) into an operation.  Only numeric literals and the
    operators + - * / // % ** are allowed."""
    tree = ast.parse(expr, mode="eval")
    names = {f"x{i + 1}": i for i in range(arity)}
    names.update({n: i for i, n in enumerate("xyz") if i < arity})

    def ev(node, args):
        match node:
            case ast.Expression(body):
                return ev(body, args)
            case ast.Constant(value) if isinstance(value, (int, float)) and not isinstance(value, bool):
                return number(value)
            case ast.Name(id) if id in names:
                return args[names[id]]
            case ast.BinOp(left, op, right) if type(op) in _BINOPS:
                return _BINOPS[type(op)](ev(left, args), ev(right, args))
            case ast.UnaryOp(op, operand) if type(op) in _UNOPS:
                return _UNOPS[type(op)](ev(operand, args))
        raise ValueError(f"unsupported expression {ast.unparse(node)!r}")

    for node in ast.walk(tree):
        allowed = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Load, *_BINOPS, *_UNOPS)
        if not isinstance(node, allowed) or isinstance(node, ast.Name) and node.id not in names:
            raise ValueError(f"unsupported expression {expr!r}")
    return lambda *args: ev(tree, list(args))


def _builtin(name, arity):
    match name, arity:
        case "+", _:
            return lambda *xs: sum(xs[1:], xs[0]) if xs else 0
        case "*", _:
            def prod(*xs):
                out = 1
                for x in xs:
                    out = out * x
                return out
            return prod
        case ("-" | "−"), 1:
            return operator.neg
        case ("-" | "−"), 2:
            return operator.sub
        case "succ", 1:
            return lambda x: x + 1
        case "pred", 1:
            return lambda x: x - 1
    return None


def arithmetic_algebra(
    sig: Signature,
    kind: str = "int",
    consts: Mapping[str, Any] | None = None,
    ops: Mapping[str, str] | None = None,
    bottom: Any = 0,
    max_iterations: int = 10_000,
    tolerance: float = 1e-9,
) -> Algebra:
    """Integer (``int``) or rational (``rat``) algebra.

    ``+``, ``*``, ``-``/``−``, ``succ`` and ``pred`` are built in; nullary
    operations are bound through ``consts`` and anything else through
    ``ops`` (name -> expression, see ``expression_op``).
    """
    if kind not in ("int", "rat"):
        raise ValueError(f"unknown algebra {kind!r}")
    number = int if kind == "int" else Fraction
    consts = {k: number(v) for k, v in (consts or {}).items()}
    ops = dict(ops or {})
    interp = {}
    for op in sig.ops:
        if op.name in ops:
            fn = expression_op(ops[op.name], op.arity, number)
            if kind == "int":
                fn = (lambda g: lambda *xs: int(g(*xs)))(fn)
            interp[op.name] = fn
        elif op.arity == 0 and op.name in consts:
            interp[op.name] = (lambda v: lambda: v)(consts[op.name])
        elif op.arity > 0 and _builtin(op.name, op.arity):
            interp[op.name] = _builtin(op.name, op.arity)
    for name in (*consts, *ops):
        if not sig.has_op(name):
            raise UnknownOp(f"binding for unknown operation {name!r}")
    solver = FixpointSolver({s: number(bottom) for s in sig.sorts}, max_iterations, tolerance)
    return Algebra(sig, interp, solver)
