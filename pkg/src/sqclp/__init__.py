"""Logic programming with qualification values, proximity relations and
arithmetic constraints: parser, lattice of qualification domains, constraint
store, model construction, proof search and checking, and a goal solver."""

from .constraints import FALSE, TRUE, UNKNOWN, ConstraintStore, Tristate
from .engine import (
    GoalSolution,
    SolveOptions,
    brute_ground_solutions,
    is_solution,
    solve,
    subsumes,
)
from .program import (
    Clause,
    Goal,
    ParseError,
    Program,
    format_program,
    parse_goal,
    parse_program,
)
from .proximity import ProximityRelation, identity_relation, term_prox
from .qualdom import ANY, INF, QualDomain, QualError, parse_domain
from .semantics import (
    Interpretation,
    ProofTree,
    QcAtom,
    check_proof,
    derive,
    make_universe,
    proof_stats,
    tp_lfp,
)

__version__ = "0.1.0"

__all__ = [
    "ANY",
    "Clause",
    "ConstraintStore",
    "FALSE",
    "Goal",
    "GoalSolution",
    "INF",
    "Interpretation",
    "ParseError",
    "Program",
    "ProofTree",
    "ProximityRelation",
    "QcAtom",
    "QualDomain",
    "QualError",
    "SolveOptions",
    "TRUE",
    "Tristate",
    "UNKNOWN",
    "brute_ground_solutions",
    "check_proof",
    "derive",
    "format_program",
    "identity_relation",
    "is_solution",
    "make_universe",
    "parse_domain",
    "parse_goal",
    "parse_program",
    "proof_stats",
    "solve",
    "subsumes",
    "term_prox",
    "tp_lfp",
]
