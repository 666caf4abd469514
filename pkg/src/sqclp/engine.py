"""Goal solving and solution checking.

A goal is a conjunction of atoms, each annotated with a qualification
variable and an optional threshold.  Solutions are triples (sigma, mu,
store): a substitution for the goal's term variables, a qualification value
for each qualification variable, and a satisfiable store under which every
instantiated atom is derivable at its assigned degree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .constraints import (
    ConstraintStore,
    Tristate,
    TRUE,
    FALSE,
    UNKNOWN,
    eval_primitive,
)
from .program import Clause, Goal, Program, format_atom
from .proximity import term_prox
from .qualdom import ANY, QualValue
from .semantics import (
    QcAtom,
    TermUniverse,
    check_proof,
    derive,
    derive_candidates,
    make_universe,
)
from .terms import (
    Atom,
    Basic,
    App,
    Defined,
    Equation,
    Primitive,
    Subst,
    Term,
    Var,
    apply_subst,
    is_ground,
    match,
    variables,
)


class EngineError(Exception):
    pass


@dataclass(frozen=True)
class GoalSolution:
    sigma: tuple[tuple[str, Term], ...]
    mu: tuple[tuple[str, QualValue], ...]
    store: ConstraintStore

    def sigma_dict(self) -> Subst:
        return dict(self.sigma)

    def mu_dict(self) -> dict[str, QualValue]:
        return dict(self.mu)


@dataclass(frozen=True)
class SolveOptions:
    depth_limit: int = 6
    universe_depth: int = 2
    max_solutions: int = 20
    store_seed: Optional[ConstraintStore] = None


def goal_vars(goal: Goal) -> list[str]:
    out: list[str] = []
    for item in goal.items:
        atom = item.atom
        parts = (atom.lhs, atom.rhs) if isinstance(atom, Equation) else atom.args
        for t in parts:
            for v in sorted(variables(t)):
                if v not in out:
                    out.append(v)
    return out


def solve(prog: Program, goal: Goal, opts: SolveOptions = SolveOptions(),
          diag: Optional[list] = None) -> list[GoalSolution]:
    dom = prog.qdom
    seed = opts.store_seed if opts.store_seed is not None else prog.store([])
    if seed.satisfiable() is FALSE:
        raise EngineError("the seed store is unsatisfiable")
    gvars = goal_vars(goal)
    universe = make_universe(prog, seed, extra_vars=gvars,
                             depth=opts.universe_depth)
    uni = universe.terms()
    out: list[GoalSolution] = []
    seen = set()
    for binding in itertools.product(uni, repeat=len(gvars)):
        sigma = dict(zip(gvars, binding))
        per_item = []
        feasible = True
        for item in goal.items:
            atom = apply_subst(item.atom, sigma)
            cands = [
                c
                for c in derive_candidates(prog, atom, seed, opts.depth_limit,
                                           universe, diag,
                                           collect_primitives=True)
                if dom.threshold_ok(c[0], item.threshold)
            ]
            if not cands:
                feasible = False
                break
            per_item.append(cands)
        if not feasible:
            continue
        for combo in itertools.product(*per_item):
            collected = tuple(a for c in combo for a in c[2])
            store = seed.with_atoms(collected) if collected else seed
            if store.satisfiable() is FALSE:
                continue
            mu = tuple(
                (item.qvar, c[0]) for item, c in zip(goal.items, combo)
            )
            canon_sigma = tuple(
                (v, store.canonical_form(t))
                for v, t in sorted(sigma.items())
                if t != Var(v)
            )
            key = (canon_sigma, mu, store)
            if key in seen:
                continue
            if collected and not _recheck(prog, goal, canon_sigma, mu, store,
                                          opts, diag):
                continue
            seen.add(key)
            out.append(GoalSolution(canon_sigma, mu, store))
            if len(out) >= opts.max_solutions:
                return out
    return out


def _recheck(prog, goal, sigma, mu, store, opts, diag) -> bool:
    """Re-derive every goal atom against the final store (degrees were
    computed against the seed before constraints were collected)."""
    sd, md = dict(sigma), dict(mu)
    for item in goal.items:
        phi = QcAtom(apply_subst(item.atom, sd), md[item.qvar], store)
        if not phi.observable(prog.qdom):
            return False
        if derive(prog, phi, opts.depth_limit, diag=diag) is None:
            return False
    return True


def is_solution(prog: Program, goal: Goal, sol: GoalSolution,
                depth_limit: int = 6,
                diag: Optional[list] = None) -> Tristate:
    dom = prog.qdom
    mu = sol.mu_dict()
    sigma = sol.sigma_dict()
    for item in goal.items:
        if item.qvar not in mu:
            return FALSE
    if any(mu[i.qvar] == dom.bottom for i in goal.items):
        return FALSE
    sat = sol.store.satisfiable()
    if sat is FALSE:
        return FALSE
    out = TRUE if sat is TRUE else UNKNOWN
    for item in goal.items:
        if not dom.threshold_ok(mu[item.qvar], item.threshold):
            return FALSE
    for item in goal.items:
        phi = QcAtom(apply_subst(item.atom, sigma), mu[item.qvar], sol.store)
        local: list = []
        tree = derive(prog, phi, depth_limit, diag=local)
        if diag is not None:
            diag.extend(local)
        if tree is None:
            return UNKNOWN if local else FALSE
        if check_proof(prog, tree) is not TRUE:
            return UNKNOWN if local else FALSE
    return out


def subsumes(sol: GoalSolution, ground: GoalSolution, goal: Goal,
             prog: Program) -> Tristate:
    """Does the computed answer cover the ground solution: some solution nu
    of the answer store sends sigma to the ground bindings, with pointwise
    lower ground qualifications."""
    dom = prog.qdom
    if ground.store.atoms:
        raise EngineError("ground solutions carry an empty store")
    rho, mu = ground.mu_dict(), sol.mu_dict()
    for item in goal.items:
        if item.qvar not in rho or item.qvar not in mu:
            return FALSE
        if not dom.leq(rho[item.qvar], mu[item.qvar]):
            return FALSE
    sigma, eta = sol.sigma_dict(), ground.sigma_dict()
    equations = []
    for v in goal_vars(goal):
        target = eta.get(v)
        if target is None or not is_ground(target):
            raise EngineError("ground solutions bind every goal variable")
        equations.append(Equation(sigma.get(v, Var(v)), target))
    return sol.store.with_atoms(equations).satisfiable()


# ---------------------------------------------------------------------------
# Independent ground oracle
#
# A bottom-up evaluator over ground terms with empty stores, written apart
# from the proof search: closeness is the syntactic term proximity, body
# support is a table of already-derived ground atoms, and primitive atoms
# are evaluated directly.

def _ground_table(prog: Program, universe: TermUniverse, iters: int):
    dom = prog.qdom
    ground_terms = [t for t in universe.terms() if is_ground(t)]
    table: dict[Defined, list[QualValue]] = {}

    def add(atom: Defined, d: QualValue) -> bool:
        bucket = table.setdefault(atom, [])
        if any(dom.leq(d, e) for e in bucket):
            return False
        bucket[:] = [e for e in bucket if not dom.leq(e, d)] + [d]
        return True

    preds = {n: a for n, (c, a) in prog.signature.items() if c == "pred"}
    for _ in range(iters):
        changed = False
        for clause in prog.clauses:
            cvars = sorted(
                {v for t in _clause_all_terms(clause) for v in variables(t)}
            )
            for binding in itertools.product(ground_terms, repeat=len(cvars)):
                theta = dict(zip(cvars, binding))
                supports = []
                ok = True
                for atom, w in clause.body:
                    inst = apply_subst(atom, theta)
                    cands = []
                    if isinstance(inst, Defined):
                        for e in table.get(inst, []):
                            if dom.threshold_ok(e, w):
                                cands.append(e)
                    elif isinstance(inst, Primitive):
                        if is_ground(inst) and eval_primitive(inst):
                            if dom.threshold_ok(dom.top, w):
                                cands.append(dom.top)
                    else:
                        e = term_prox(prog.prox, inst.lhs, inst.rhs)
                        if e != dom.bottom and dom.threshold_ok(e, w):
                            cands.append(e)
                    if not cands:
                        ok = False
                        break
                    supports.append(cands)
                if not ok:
                    continue
                head_inst = apply_subst(clause.head, theta)
                for p_prime, arity in sorted(preds.items()):
                    if arity != len(head_inst.args):
                        continue
                    d0 = prog.prox.prox(clause.head.pred, p_prime)
                    if d0 == dom.bottom:
                        continue
                    position_cands = []
                    for t in clause.head.args:
                        cands_i = []
                        for t_prime in ground_terms:
                            di = _aligned_prox(prog, t_prime, t, theta)
                            if di != dom.bottom:
                                cands_i.append((t_prime, di))
                        position_cands.append(cands_i)
                    for choice in itertools.product(*position_cands):
                        target_args = tuple(tp for tp, _ in choice)
                        base = dom.infimum([d0] + [di for _, di in choice])
                        if base == dom.bottom:
                            continue
                        for combo in itertools.product(*supports):
                            d = dom.glb(
                                base,
                                dom.attenuate(clause.alpha, dom.infimum(combo)),
                            )
                            if d != dom.bottom:
                                changed |= add(
                                    Defined(p_prime, tuple(target_args)), d
                                )
        if not changed:
            break
    return table


def _aligned_prox(prog: Program, t_prime, t, theta) -> QualValue:
    """Proximity of a candidate target term to a clause head argument,
    requiring exact agreement at the head's variable positions.  Answers
    instantiate head variables by matching the goal atom, so proximity
    enters only at constructor positions and at body derivations."""
    dom = prog.qdom
    if isinstance(t, Var):
        return dom.top if t_prime == theta[t.name] else dom.bottom
    if isinstance(t, Basic):
        return dom.top if t_prime == t else dom.bottom
    if not isinstance(t_prime, App) or len(t_prime.args) != len(t.args):
        return dom.bottom
    return dom.infimum(
        [prog.prox.prox(t_prime.ctor, t.ctor)]
        + [_aligned_prox(prog, a, b, theta) for a, b in zip(t_prime.args, t.args)]
    )


def _clause_all_terms(clause: Clause):
    yield from clause.head.args
    for atom, _ in clause.body:
        if isinstance(atom, Equation):
            yield atom.lhs
            yield atom.rhs
        else:
            yield from atom.args


def brute_ground_solutions(prog: Program, goal: Goal, universe: TermUniverse,
                           iters: int = 6) -> list[GoalSolution]:
    """All ground solutions with empty stores over the universe, keeping
    only the maximal qualification per ground substitution."""
    dom = prog.qdom
    table = _ground_table(prog, universe, iters)
    ground_terms = [t for t in universe.terms() if is_ground(t)]
    gvars = goal_vars(goal)
    empty = prog.store([])
    out: list[GoalSolution] = []
    for binding in itertools.product(ground_terms, repeat=len(gvars)):
        eta = dict(zip(gvars, binding))
        per_item: list[list[QualValue]] = []
        ok = True
        for item in goal.items:
            inst = apply_subst(item.atom, eta)
            cands: list[QualValue] = []
            if isinstance(inst, Defined):
                cands = [
                    e
                    for e in table.get(inst, [])
                    if dom.threshold_ok(e, item.threshold)
                ]
            elif isinstance(inst, Primitive):
                if is_ground(inst) and eval_primitive(inst):
                    if dom.threshold_ok(dom.top, item.threshold):
                        cands = [dom.top]
            else:
                e = term_prox(prog.prox, inst.lhs, inst.rhs)
                if e != dom.bottom and dom.threshold_ok(e, item.threshold):
                    cands = [e]
            if not cands:
                ok = False
                break
            per_item.append(cands)
        if not ok:
            continue
        sigma = tuple(sorted(eta.items()))
        for combo in itertools.product(*per_item):
            rho = tuple((i.qvar, e) for i, e in zip(goal.items, combo))
            out.append(GoalSolution(sigma, rho, empty))
    return out
