"""Proximity relations between symbols, lifted to terms and atoms.

A relation is a finite symmetric table of non-bottom degrees between
syntactic symbols; every symbol is close to itself at top.  Two closeness
tests are provided: the purely syntactic one and the one modulo a
constraint store, where variables may be expanded to equal non-variable
terms before comparing structure.
"""
from __future__ import annotations

import itertools
from typing import Optional, Union

from .constraints import ConstraintStore, Tristate, TRUE, FALSE, UNKNOWN
from .qualdom import QualDomain, QualValue
from .terms import (
    App,
    Atom,
    Basic,
    Defined,
    Equation,
    Primitive,
    PRIMITIVE_PREDS,
    Term,
    Var,
)


class ProximityError(Exception):
    pass


class ProximityRelation:
    """Reflexive symmetric D-valued relation on symbol names."""

    def __init__(self, dom: QualDomain, entries=()):
        self.dom = dom
        table: dict[frozenset, QualValue] = {}
        for a, b, v in entries:
            dom.check(v)
            if a == b:
                if v != dom.top:
                    raise ProximityError(
                        "self-proximity of %r must be the top value" % a
                    )
                continue
            key = frozenset((a, b))
            if key in table and table[key] != v:
                raise ProximityError("conflicting entries for (%s, %s)" % (a, b))
            table[key] = v
        self.entries = table

    def prox(self, x: str, y: str) -> QualValue:
        if x == y:
            return self.dom.top
        return self.entries.get(frozenset((x, y)), self.dom.bottom)

    def is_identity(self) -> bool:
        return all(v == self.dom.bottom for v in self.entries.values())

    def symbols(self) -> set:
        return {s for key in self.entries for s in key}

    def __repr__(self) -> str:
        body = ", ".join(
            "~(%s, %s) = %s" % (*sorted(k), self.dom.format(v))
            for k, v in sorted(self.entries.items(), key=lambda kv: sorted(kv[0]))
        )
        return "ProximityRelation(%s; %s)" % (self.dom.name, body)


def identity_relation(dom: QualDomain) -> ProximityRelation:
    return ProximityRelation(dom, ())


def validate_admissible(
    rel: ProximityRelation, signature: dict[str, tuple[str, int]]
) -> list[str]:
    """Check the relation against a signature mapping each symbol name to
    (category, arity), category in {"ctor", "pred"}.  Returns a list of
    human-readable violations; empty means admissible."""
    out = []
    for key, v in sorted(rel.entries.items(), key=lambda kv: sorted(kv[0])):
        a, b = sorted(key)
        if v == rel.dom.bottom:
            continue
        if a in PRIMITIVE_PREDS or b in PRIMITIVE_PREDS:
            out.append("primitive pair: ~(%s, %s) is not allowed" % (a, b))
            continue
        if a not in signature or b not in signature:
            missing = a if a not in signature else b
            out.append("unknown symbol %r in proximity entry ~(%s, %s)" % (missing, a, b))
            continue
        (cat_a, ar_a), (cat_b, ar_b) = signature[a], signature[b]
        if cat_a != cat_b:
            out.append("category mismatch: ~(%s, %s) relates a %s to a %s"
                       % (a, b, cat_a, cat_b))
        elif ar_a != ar_b:
            out.append("arity mismatch: ~(%s/%d, %s/%d)" % (a, ar_a, b, ar_b))
    return out


def is_similarity(rel: ProximityRelation, symbols) -> bool:
    """Transitivity check over a finite symbol universe."""
    dom = rel.dom
    syms = sorted(set(symbols) | rel.symbols())
    for x, y, z in itertools.product(syms, repeat=3):
        if not dom.leq(dom.glb(rel.prox(x, y), rel.prox(y, z)), rel.prox(x, z)):
            return False
    return True


# ---------------------------------------------------------------------------
# Syntactic closeness on terms and atoms

def term_prox(rel: ProximityRelation, t: Union[Term, Atom], s: Union[Term, Atom]) -> QualValue:
    dom = rel.dom
    if t == s:
        return dom.top
    if isinstance(t, Var) or isinstance(s, Var):
        return dom.bottom
    if isinstance(t, Basic) or isinstance(s, Basic):
        return dom.bottom  # distinct basic values, or basic vs constructor
    if isinstance(t, App) and isinstance(s, App):
        if len(t.args) != len(s.args):
            return dom.bottom
        return dom.infimum(
            [rel.prox(t.ctor, s.ctor)]
            + [term_prox(rel, a, b) for a, b in zip(t.args, s.args)]
        )
    if isinstance(t, Defined) and isinstance(s, Defined):
        if len(t.args) != len(s.args):
            return dom.bottom
        return dom.infimum(
            [rel.prox(t.pred, s.pred)]
            + [term_prox(rel, a, b) for a, b in zip(t.args, s.args)]
        )
    if isinstance(t, (Primitive, Equation)) and isinstance(s, (Primitive, Equation)):
        if isinstance(t, Primitive) != isinstance(s, Primitive):
            return dom.bottom
        if isinstance(t, Primitive):
            if t.pred != s.pred or len(t.args) != len(s.args):
                return dom.bottom
            return dom.infimum(term_prox(rel, a, b) for a, b in zip(t.args, s.args))
        return dom.infimum(
            [term_prox(rel, t.lhs, s.lhs), term_prox(rel, t.rhs, s.rhs)]
        )
    return dom.bottom


def close_at(rel: ProximityRelation, lam: QualValue, t, s) -> bool:
    if lam == rel.dom.bottom:
        raise ProximityError("closeness level must not be the bottom value")
    return rel.dom.leq(lam, term_prox(rel, t, s))


# ---------------------------------------------------------------------------
# Closeness modulo a constraint store

def _expand(store: ConstraintStore, t: Term) -> Term:
    if isinstance(t, Var):
        w = store.class_witness(t)
        if w is not None:
            return w
    return t


def _degree_modulo(rel, store, t, s) -> tuple[QualValue, bool]:
    """(lower bound for the best degree, bound is exact)."""
    dom = rel.dom
    eq = store.pi_equiv(t, s)
    if eq is TRUE:
        return dom.top, True
    exact = eq is FALSE
    t2, s2 = _expand(store, t), _expand(store, s)
    if isinstance(t2, Var) or isinstance(s2, Var):
        return dom.bottom, exact
    if isinstance(t2, Basic) or isinstance(s2, Basic):
        # equal basics are already covered by the store equivalence
        return dom.bottom, exact
    if t2.ctor != s2.ctor and rel.prox(t2.ctor, s2.ctor) == dom.bottom:
        return dom.bottom, True
    if len(t2.args) != len(s2.args):
        return dom.bottom, True
    degree = rel.prox(t2.ctor, s2.ctor)
    for a, b in zip(t2.args, s2.args):
        d, ex = _degree_modulo(rel, store, a, b)
        if d == dom.bottom and ex:
            return dom.bottom, True
        exact = exact and ex
        degree = dom.glb(degree, d)
    if degree == dom.bottom and not exact:
        return dom.bottom, False
    return degree, exact


def prox_degree_modulo(
    rel: ProximityRelation, store: ConstraintStore, t: Term, s: Term
) -> Union[QualValue, Tristate]:
    """Best degree at which t and s are close modulo the store; the
    Tristate Unknown value when entailment cannot decide it."""
    degree, exact = _degree_modulo(rel, store, t, s)
    return degree if exact else UNKNOWN


def close_at_modulo(
    rel: ProximityRelation,
    lam: QualValue,
    store: ConstraintStore,
    t: Term,
    s: Term,
) -> Tristate:
    if lam == rel.dom.bottom:
        raise ProximityError("closeness level must not be the bottom value")
    degree, exact = _degree_modulo(rel, store, t, s)
    if rel.dom.leq(lam, degree):
        return TRUE
    return FALSE if exact else UNKNOWN


def atom_prox_modulo(
    rel: ProximityRelation, store: ConstraintStore, a: Atom, b: Atom
) -> tuple[QualValue, bool]:
    """Best closeness degree between two atoms modulo the store, with an
    exactness flag (same convention as prox_degree_modulo)."""
    dom = rel.dom
    if isinstance(a, Defined) and isinstance(b, Defined):
        if len(a.args) != len(b.args):
            return dom.bottom, True
        head = rel.prox(a.pred, b.pred)
        if head == dom.bottom:
            return dom.bottom, True
        degree, exact = head, True
        for x, y in zip(a.args, b.args):
            d, ex = _degree_modulo(rel, store, x, y)
            if d == dom.bottom and ex:
                return dom.bottom, True
            exact = exact and ex
            degree = dom.glb(degree, d)
        return degree, exact
    if isinstance(a, Primitive) and isinstance(b, Primitive):
        if a.pred != b.pred or len(a.args) != len(b.args):
            return dom.bottom, True
        degree, exact = dom.top, True
        for x, y in zip(a.args, b.args):
            d, ex = _degree_modulo(rel, store, x, y)
            if d == dom.bottom and ex:
                return dom.bottom, True
            exact = exact and ex
            degree = dom.glb(degree, d)
        return degree, exact
    if isinstance(a, Equation) and isinstance(b, Equation):
        d1, e1 = _degree_modulo(rel, store, a.lhs, b.lhs)
        d2, e2 = _degree_modulo(rel, store, a.rhs, b.rhs)
        return dom.glb(d1, d2), e1 and e2
    return dom.bottom, True
