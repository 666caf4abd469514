"""Declarative and proof-theoretic semantics.

Interpretations are finite generator sets of qualified constrained atoms
(qc-atoms) standing for their closure under instance/weakening entailment.
The bottom-up transformer enumerates immediate consequences over a bounded
term universe; the proof system has three rules (defined-atom step,
equational leaf, primitive leaf) with a checker and a depth-bounded search.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Union

from .constraints import (
    ConstraintStore,
    Tristate,
    TRUE,
    FALSE,
    UNKNOWN,
    tri_all,
)
from .program import Clause, Program, format_atom
from .proximity import close_at_modulo, prox_degree_modulo
from .qualdom import ANY, QualDomain, QualValue
from .terms import (
    App,
    Atom,
    Basic,
    Defined,
    Equation,
    Primitive,
    Subst,
    Term,
    Var,
    apply_subst,
    match_atom,
    variables,
)


class SemanticsError(Exception):
    pass


class ProofError(SemanticsError):
    """A malformed proof tree (as opposed to a failed side condition)."""


@dataclass(frozen=True)
class QcAtom:
    atom: Atom
    degree: QualValue
    store: ConstraintStore

    def observable(self, dom: QualDomain) -> bool:
        return self.degree != dom.bottom and self.store.satisfiable() is not FALSE


@dataclass(frozen=True)
class Interpretation:
    generators: tuple[QcAtom, ...] = ()


def qc_entails(dom: QualDomain, phi: QcAtom, psi: QcAtom) -> Tristate:
    """phi entails psi: psi is an instance of phi with a weaker degree and a
    stronger store."""
    theta = match_atom(phi.atom, psi.atom)
    if theta is None:
        return FALSE
    if not dom.leq(psi.degree, phi.degree):
        return FALSE
    return psi.store.entails_all(apply_subst(a, theta) for a in phi.store.atoms)


def valid_in(prog: Program, interp: Interpretation, phi: QcAtom) -> Tristate:
    if not phi.observable(prog.qdom):
        raise SemanticsError("non-observable qc-atom %r" % (phi,))
    if isinstance(phi.atom, Defined):
        out = FALSE
        for g in interp.generators:
            v = qc_entails(prog.qdom, g, phi)
            if v is TRUE:
                return TRUE
            if v is UNKNOWN:
                out = UNKNOWN
        return out
    if isinstance(phi.atom, Equation):
        return close_at_modulo(
            prog.prox, phi.degree, phi.store, phi.atom.lhs, phi.atom.rhs
        )
    if isinstance(phi.atom, Primitive):
        return phi.store.entails(phi.atom)
    raise SemanticsError("bad atom in qc-atom: %r" % (phi.atom,))


# ---------------------------------------------------------------------------
# Bounded term universe

class TermUniverse:
    def __init__(self, constructors: dict[str, int], var_names, constants=(),
                 depth: int = 2, limit: int = 5000):
        self.constructors = dict(constructors)
        self.var_names = tuple(dict.fromkeys(var_names))
        self.constants = tuple(dict.fromkeys(constants))
        self.depth = depth
        self.limit = limit
        self._terms: Optional[tuple[Term, ...]] = None

    def terms(self) -> tuple[Term, ...]:
        if self._terms is not None:
            return self._terms
        level: list[Term] = [Var(v) for v in self.var_names]
        level += [c for c in self.constants if c not in level]
        for name, arity in sorted(self.constructors.items()):
            if arity == 0 and App(name, ()) not in level:
                level.append(App(name, ()))
        out = list(level)
        for _ in range(self.depth - 1):
            new: list[Term] = []
            for name, arity in sorted(self.constructors.items()):
                if arity == 0:
                    continue
                for args in itertools.product(out, repeat=arity):
                    t = App(name, args)
                    if t not in out and t not in new:
                        new.append(t)
                    if len(out) + len(new) >= self.limit:
                        break
            out += new
            if len(out) >= self.limit:
                out = out[: self.limit]
                break
        self._terms = tuple(out)
        return self._terms


def make_universe(prog: Program, store: ConstraintStore, extra_vars=(),
                  depth: int = 2, limit: int = 5000) -> TermUniverse:
    vs: list[str] = []
    for a in store.atoms:
        vs.extend(sorted(variables(a)))
    vs.extend(extra_vars)
    return TermUniverse(prog.constructors(), vs, prog.constants(), depth, limit)


# ---------------------------------------------------------------------------
# Immediate consequences and the transformer

_MAX_THETA = 512
_MAX_BODY_COMBOS = 256


def _align(pattern: Term, target: Term, store: ConstraintStore, out):
    """Collect candidate bindings for pattern variables by structural
    descent, expanding store variables to rigid class members."""
    if isinstance(pattern, Var):
        bucket = out.setdefault(pattern.name, [])
        if target not in bucket:
            bucket.append(target)
        return
    if isinstance(pattern, App):
        t = target
        if isinstance(t, Var):
            w = store.class_witness(t)
            if w is not None:
                t = w
        if isinstance(t, App) and len(t.args) == len(pattern.args):
            for p, s in zip(pattern.args, t.args):
                _align(p, s, store, out)


def _theta_candidates(clause: Clause, target_args, store: ConstraintStore,
                      interp: Optional[Interpretation], universe_terms):
    """Candidate substitutions for the clause variables, built from head
    alignment, body-atom alignment against generators, and (as a fallback)
    the bounded universe."""
    buckets: dict[str, list[Term]] = {}
    for p, t in zip(clause.head.args, target_args):
        _align(p, t, store, buckets)
    # Head-occurring variables bind only by alignment with the target:
    # answers instantiate the head by matching, so proximity enters at
    # rigid symbol positions and inside body derivations, never by
    # rebinding a head variable to a merely-close term.
    head_vars: set[str] = set()
    for t in clause.head.args:
        head_vars |= variables(t)
    if interp is not None:
        for atom, _ in clause.body:
            if not isinstance(atom, Defined):
                continue
            for g in interp.generators:
                if isinstance(g.atom, Defined) and g.atom.pred == atom.pred \
                        and len(g.atom.args) == len(atom.args):
                    side: dict[str, list[Term]] = {}
                    for p, t in zip(atom.args, g.atom.args):
                        _align(p, t, store, side)
                    for v, opts in side.items():
                        if v in head_vars:
                            continue
                        bucket = buckets.setdefault(v, [])
                        bucket.extend(o for o in opts if o not in bucket)
    clause_vars: list[str] = []
    for t in clause.head.args:
        for v in sorted(variables(t)):
            if v not in clause_vars:
                clause_vars.append(v)
    for atom, _ in clause.body:
        parts = (atom.lhs, atom.rhs) if isinstance(atom, Equation) else atom.args
        for t in parts:
            for v in sorted(variables(t)):
                if v not in clause_vars:
                    clause_vars.append(v)
    choices = []
    for v in clause_vars:
        opts = buckets.get(v, [])
        if not opts:
            opts = list(universe_terms)
        choices.append(opts)
    count = 0
    for combo in itertools.product(*choices):
        if count >= _MAX_THETA:
            return
        count += 1
        yield dict(zip(clause_vars, combo))


def _body_candidates(prog: Program, interp: Interpretation, atom: Atom,
                     store: ConstraintStore, diag: Optional[list]):
    """Candidate degrees at which a body atom is valid in the
    interpretation."""
    dom = prog.qdom
    if isinstance(atom, Defined):
        out: list[QualValue] = []
        for g in interp.generators:
            if not isinstance(g.atom, Defined):
                continue
            v = qc_entails(dom, g, QcAtom(atom, g.degree, store))
            if v is TRUE:
                if g.degree not in out:
                    out.append(g.degree)
            elif v is UNKNOWN and diag is not None:
                diag.append("unknown entailment for body atom %s" % format_atom(atom))
        return out
    if isinstance(atom, Primitive):
        v = store.entails(atom)
        if v is TRUE:
            return [dom.top]
        if v is UNKNOWN and diag is not None:
            diag.append("unknown entailment for %s" % format_atom(atom))
        return []
    if isinstance(atom, Equation):
        d = prox_degree_modulo(prog.prox, store, atom.lhs, atom.rhs)
        if d is UNKNOWN:
            if diag is not None:
                diag.append("unknown closeness for %s" % format_atom(atom))
            return []
        if d == dom.bottom:
            return []
        return [d]
    raise SemanticsError("bad body atom %r" % (atom,))


def immediate_consequence(prog: Program, interp: Interpretation, clause: Clause,
                          target_pred: str, store: ConstraintStore,
                          universe: TermUniverse,
                          diag: Optional[list] = None) -> list[QcAtom]:
    dom = prog.qdom
    if store.satisfiable() is FALSE:
        raise SemanticsError("the store must be satisfiable")
    d0 = prog.prox.prox(clause.head.pred, target_pred)
    if d0 == dom.bottom:
        return []
    arity = len(clause.head.args)
    uni = universe.terms()
    out: list[QcAtom] = []
    for target_args in itertools.product(uni, repeat=arity):
        best = _best_degrees(prog, interp, clause, d0, target_args, store, uni, diag)
        for d in best:
            phi = QcAtom(Defined(target_pred, tuple(target_args)), d, store)
            out.append(phi)
    return out


def _best_degrees(prog, interp, clause, d0, target_args, store, uni, diag):
    """Maximal degrees d for one target instance; empty when no candidate
    substitution works."""
    dom = prog.qdom
    found: list[QualValue] = []
    for theta in _theta_candidates(clause, target_args, store, interp, uni):
        degree = d0
        ok = True
        for t_prime, t in zip(target_args, clause.head.args):
            di, exact = _position_degree(prog, store, t_prime, apply_subst(t, theta))
            if di is None:
                if diag is not None and not exact:
                    diag.append("unknown closeness at a head position")
                ok = False
                break
            degree = dom.glb(degree, di)
        if not ok or degree == dom.bottom:
            continue
        per_atom: list[list[QualValue]] = []
        for atom, w in clause.body:
            cands = [
                e
                for e in _body_candidates(prog, interp, apply_subst(atom, theta),
                                          store, diag)
                if dom.threshold_ok(e, w)
            ]
            if not cands:
                ok = False
                break
            per_atom.append(cands)
        if not ok:
            continue
        for combo in itertools.islice(
            itertools.product(*per_atom), _MAX_BODY_COMBOS
        ):
            # an empty body still caps the degree at alpha (attenuation of
            # the empty infimum, i.e. of top)
            d = dom.glb(degree, dom.attenuate(clause.alpha, dom.infimum(combo)))
            if d != dom.bottom and d not in found:
                found.append(d)
    # keep only maximal degrees
    return [
        d
        for d in found
        if not any(e != d and dom.leq(d, e) for e in found)
    ]


def _position_degree(prog, store, t_prime, t_theta):
    d = prox_degree_modulo(prog.prox, store, t_prime, t_theta)
    if d is UNKNOWN:
        return None, False
    if d == prog.qdom.bottom:
        return None, True
    return d, True


def tp_step(prog: Program, interp: Interpretation, store: ConstraintStore,
            universe: TermUniverse, diag: Optional[list] = None) -> Interpretation:
    dom = prog.qdom
    new: list[QcAtom] = list(interp.generators)
    preds = sorted(
        {n for n, (c, _) in prog.signature.items() if c == "pred"}
    )
    for clause in prog.clauses:
        arity = len(clause.head.args)
        for p_prime in preds:
            if prog.signature[p_prime][1] != arity:
                continue
            for phi in immediate_consequence(prog, interp, clause, p_prime,
                                             store, universe, diag):
                if not any(qc_entails(dom, g, phi) is TRUE for g in new):
                    new = [g for g in new if qc_entails(dom, phi, g) is not TRUE]
                    new.append(phi)
    return Interpretation(tuple(new))


def tp_lfp(prog: Program, store: ConstraintStore, universe: TermUniverse,
           max_iters: int = 10,
           diag: Optional[list] = None) -> tuple[Interpretation, int, bool]:
    interp = Interpretation()
    for i in range(1, max_iters + 1):
        nxt = tp_step(prog, interp, store, universe, diag)
        if _same_interp(prog.qdom, nxt, interp):
            return nxt, i, True
        interp = nxt
    return nxt, max_iters, False


def _same_interp(dom, a: Interpretation, b: Interpretation) -> bool:
    return all(
        any(qc_entails(dom, h, g) is TRUE for h in b.generators)
        for g in a.generators
    ) and all(
        any(qc_entails(dom, h, g) is TRUE for h in a.generators)
        for g in b.generators
    )


def is_prefixpoint(prog: Program, interp: Interpretation, store: ConstraintStore,
                   universe: TermUniverse) -> Tristate:
    out = TRUE
    for clause in prog.clauses:
        arity = len(clause.head.args)
        for p_prime in sorted(
            n for n, (c, a) in prog.signature.items() if c == "pred" and a == arity
        ):
            for phi in immediate_consequence(prog, interp, clause, p_prime,
                                             store, universe):
                v = valid_in(prog, interp, phi)
                if v is FALSE:
                    return FALSE
                if v is UNKNOWN:
                    out = UNKNOWN
    return out


# ---------------------------------------------------------------------------
# Proof trees

@dataclass(frozen=True)
class ProofTree:
    conclusion: QcAtom
    rule: str  # "SQDA" | "SQEA" | "SQPA"
    children: tuple["ProofTree", ...] = ()
    clause_label: str = ""
    theta: tuple[tuple[str, Term], ...] = ()


@dataclass(frozen=True)
class ProofStats:
    size: int
    defined_steps: int


def proof_stats(tree: ProofTree) -> ProofStats:
    size = 1 + sum(proof_stats(c).size for c in tree.children)
    sqda = (1 if tree.rule == "SQDA" else 0) + sum(
        proof_stats(c).defined_steps for c in tree.children
    )
    return ProofStats(size, sqda)


def check_proof(prog: Program, tree: ProofTree) -> Tristate:
    dom = prog.qdom
    phi = tree.conclusion
    if phi.degree == dom.bottom:
        return FALSE
    sat = phi.store.satisfiable()
    if sat is FALSE:
        return FALSE
    verdicts = [TRUE if sat is TRUE else UNKNOWN]
    if tree.rule == "SQEA":
        if not isinstance(phi.atom, Equation) or tree.children:
            raise ProofError("equational steps are leaves proving equations")
        verdicts.append(
            close_at_modulo(prog.prox, phi.degree, phi.store, phi.atom.lhs,
                            phi.atom.rhs)
        )
        return tri_all(verdicts)
    if tree.rule == "SQPA":
        if not isinstance(phi.atom, Primitive) or tree.children:
            raise ProofError("primitive steps are leaves proving primitive atoms")
        verdicts.append(phi.store.entails(phi.atom))
        return tri_all(verdicts)
    if tree.rule != "SQDA":
        raise ProofError("unknown rule %r" % tree.rule)
    if not isinstance(phi.atom, Defined):
        raise ProofError("defined-atom steps prove defined atoms")
    clause = _clause_by_label(prog, tree.clause_label)
    n = len(clause.head.args)
    m = len(clause.body)
    if len(phi.atom.args) != n:
        return FALSE
    if len(tree.children) != n + m:
        raise ProofError(
            "expected %d children (%d head equations + %d body atoms), got %d"
            % (n + m, n, m, len(tree.children))
        )
    theta = dict(tree.theta)
    d0 = prog.prox.prox(clause.head.pred, phi.atom.pred)
    if d0 == dom.bottom or not dom.leq(phi.degree, d0):
        return FALSE
    for i in range(n):
        child = tree.children[i]
        expected = Equation(phi.atom.args[i], apply_subst(clause.head.args[i], theta))
        if child.conclusion.atom != expected or child.conclusion.store != phi.store:
            raise ProofError("head-equation child %d proves the wrong qc-atom" % (i + 1))
        if not dom.leq(phi.degree, child.conclusion.degree):
            return FALSE
        verdicts.append(check_proof(prog, child))
    if m == 0 and not dom.leq(phi.degree, dom.attenuate(clause.alpha, dom.top)):
        return FALSE
    for j in range(m):
        child = tree.children[n + j]
        atom, w = clause.body[j]
        if child.conclusion.atom != apply_subst(atom, theta) \
                or child.conclusion.store != phi.store:
            raise ProofError("body child %d proves the wrong qc-atom" % (j + 1))
        e = child.conclusion.degree
        if not dom.threshold_ok(e, w):
            return FALSE
        if not dom.leq(phi.degree, dom.attenuate(clause.alpha, e)):
            return FALSE
        verdicts.append(check_proof(prog, child))
    return tri_all(verdicts)


def _clause_by_label(prog: Program, label: str) -> Clause:
    for c in prog.clauses:
        if c.label == label:
            return c
    raise ProofError("unknown clause label %r" % label)


# ---------------------------------------------------------------------------
# Depth-bounded proof search

def derive_candidates(prog: Program, atom: Atom, store: ConstraintStore,
                      depth: int, universe: TermUniverse,
                      diag: Optional[list] = None,
                      collect_primitives: bool = False,
                      _cache: Optional[dict] = None
                      ) -> list[tuple[QualValue, ProofTree, tuple[Atom, ...]]]:
    """All maximal degrees (with proofs) at which the atom is derivable
    within the depth bound.  With collect_primitives, primitive atoms the
    store does not entail are assumed and returned as collected constraints
    instead of failing."""
    dom = prog.qdom
    if _cache is None:
        _cache = {}
    cache_key = (atom, store, depth, collect_primitives)
    if cache_key in _cache:
        return _cache[cache_key]
    out = _derive_candidates(prog, atom, store, depth, universe, diag,
                             collect_primitives, _cache)
    _cache[cache_key] = out
    return out


def _derive_candidates(prog, atom, store, depth, universe, diag,
                       collect_primitives, _cache):
    dom = prog.qdom
    if isinstance(atom, Equation):
        d = prox_degree_modulo(prog.prox, store, atom.lhs, atom.rhs)
        if d is UNKNOWN:
            if diag is not None:
                diag.append("unknown closeness for %s" % format_atom(atom))
            return []
        if d == dom.bottom:
            return []
        return [(d, ProofTree(QcAtom(atom, d, store), "SQEA"), ())]
    if isinstance(atom, Primitive):
        v = store.entails(atom)
        if v is TRUE:
            return [(dom.top, ProofTree(QcAtom(atom, dom.top, store), "SQPA"), ())]
        if collect_primitives:
            return [(dom.top, ProofTree(QcAtom(atom, dom.top, store), "SQPA"),
                     (atom,))]
        if v is UNKNOWN and diag is not None:
            diag.append("unknown entailment for %s" % format_atom(atom))
        return []
    if not isinstance(atom, Defined):
        raise SemanticsError("cannot derive %r" % (atom,))
    if depth <= 0:
        return []
    uni = universe.terms()
    found: list[tuple[QualValue, ProofTree, tuple[Atom, ...]]] = []
    for clause in prog.clauses:
        if len(clause.head.args) != len(atom.args):
            continue
        d0 = prog.prox.prox(clause.head.pred, atom.pred)
        if d0 == dom.bottom:
            continue
        for theta in _theta_candidates(clause, atom.args, store, None, uni):
            head_children: list[ProofTree] = []
            degree = d0
            ok = True
            for t_prime, t in zip(atom.args, clause.head.args):
                t_inst = apply_subst(t, theta)
                di, _ = _position_degree(prog, store, t_prime, t_inst)
                if di is None:
                    ok = False
                    break
                degree = dom.glb(degree, di)
                head_children.append(
                    ProofTree(QcAtom(Equation(t_prime, t_inst), di, store), "SQEA")
                )
            if not ok or degree == dom.bottom:
                continue
            per_atom: list[list[tuple[QualValue, ProofTree, tuple[Atom, ...]]]] = []
            for batom, w in clause.body:
                cands = [
                    c
                    for c in derive_candidates(
                        prog, apply_subst(batom, theta), store, depth - 1,
                        universe, diag, collect_primitives, _cache
                    )
                    if dom.threshold_ok(c[0], w)
                ]
                if not cands:
                    ok = False
                    break
                per_atom.append(cands)
            if not ok:
                continue
            theta_t = tuple(sorted(theta.items()))
            for combo in itertools.islice(
                itertools.product(*per_atom), _MAX_BODY_COMBOS
            ):
                d = dom.glb(
                    degree,
                    dom.attenuate(clause.alpha, dom.infimum(c[0] for c in combo)),
                )
                if d == dom.bottom:
                    continue
                collected: tuple[Atom, ...] = tuple(
                    a for c in combo for a in c[2]
                )
                tree = ProofTree(
                    QcAtom(atom, d, store),
                    "SQDA",
                    tuple(head_children) + tuple(c[1] for c in combo),
                    clause.label,
                    theta_t,
                )
                if not any(
                    f[0] == d and f[2] == collected for f in found
                ):
                    found.append((d, tree, collected))
    # keep only entries whose degree is maximal among equal collections
    out = []
    for d, tree, coll in found:
        if not any(
            coll2 == coll and d2 != d and dom.leq(d, d2)
            for d2, _, coll2 in found
        ):
            out.append((d, tree, coll))
    return out


def derive(prog: Program, phi: QcAtom, depth_limit: int = 6,
           universe: Optional[TermUniverse] = None,
           diag: Optional[list] = None) -> Optional[ProofTree]:
    """A proof of the qc-atom, or None when the bounded search fails."""
    dom = prog.qdom
    if not phi.observable(dom):
        raise SemanticsError("non-observable qc-atom %r" % (phi,))
    if universe is None:
        universe = make_universe(prog, phi.store)
    if isinstance(phi.atom, (Equation, Primitive)):
        for d, tree, _ in derive_candidates(prog, phi.atom, phi.store,
                                            depth_limit, universe, diag):
            if dom.leq(phi.degree, d):
                return ProofTree(phi, tree.rule)
        return None
    for d, tree, _ in derive_candidates(prog, phi.atom, phi.store, depth_limit,
                                        universe, diag):
        if dom.leq(phi.degree, d):
            return ProofTree(phi, tree.rule, tree.children, tree.clause_label,
                             tree.theta)
    return None


# ---------------------------------------------------------------------------
# JSON serialization

def store_to_json(store: ConstraintStore) -> list[str]:
    return [format_atom(a) for a in store.atoms]


def qcatom_to_json(dom: QualDomain, phi: QcAtom) -> dict:
    return {
        "atom": format_atom(phi.atom),
        "degree": dom.format(phi.degree),
        "store": store_to_json(phi.store),
    }


def interp_to_json(dom: QualDomain, interp: Interpretation) -> list[dict]:
    return [qcatom_to_json(dom, g) for g in interp.generators]


def proof_to_json(dom: QualDomain, tree: ProofTree) -> dict:
    from .program import format_term

    out = {
        "rule": tree.rule,
        "conclusion": qcatom_to_json(dom, tree.conclusion),
        "children": [proof_to_json(dom, c) for c in tree.children],
    }
    if tree.rule == "SQDA":
        out["clause"] = tree.clause_label
        out["theta"] = {v: format_term(t) for v, t in tree.theta}
    return out


def qcatom_from_json(prog: Program, data: dict) -> QcAtom:
    from .program import parse_atom, parse_constraints

    return QcAtom(
        parse_atom(data["atom"]),
        prog.qdom.parse(data["degree"]),
        prog.store([a for s in data.get("store", []) for a in parse_constraints(s)]),
    )


def proof_from_json(prog: Program, data: dict) -> ProofTree:
    from .program import parse_term

    theta = tuple(
        sorted((v, parse_term(t)) for v, t in data.get("theta", {}).items())
    )
    return ProofTree(
        qcatom_from_json(prog, data["conclusion"]),
        data["rule"],
        tuple(proof_from_json(prog, c) for c in data.get("children", [])),
        data.get("clause", ""),
        theta,
    )
