"""Term graphs with sharing: concrete graphs, their coalgebraic presentation,
evaluation in algebras, and composition of open graphs as cospans."""

from .coalgebra import (
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
    to_abstract,
    to_cyclic,
    unfold,
    validate_atg,
    validate_cyclic,
)
from .cospan import (
    CospanTG,
    compose,
    compose_coalgebra,
    compose_concrete,
    embed,
    equiv,
    identity,
    interpret_cospan,
    pushout,
    pushout_coalgebra,
    tensor,
)
from .errors import TermGraphError
from .graphs import Acyclic, ConcreteTermGraph, Cyclic, check_morphism, classify, make_graph
from .letlang import elaborate, parse_let, print_let, to_program
from .semantics import Algebra, FixpointSolver, arithmetic_algebra, eval_tree, lift, solve_cyclic
from .signature import OpSym, Signature, make_signature, parse_signature, single_sorted
from .trees import Context, Cut, Leaf, Node, comult, counit_root, flatten, relabel, render

__version__ = "0.1.0"
