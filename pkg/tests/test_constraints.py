from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from sqclp.constraints import (
    FALSE,
    TRUE,
    UNKNOWN,
    ConstraintStore,
    satisfies,
    satisfies_store,
    subst_constraint,
)
from sqclp.program import parse_atom, parse_constraints, parse_term
from sqclp.terms import Basic, Equation, Var, apply_subst


def store(text: str, herbrand: bool = False) -> ConstraintStore:
    return ConstraintStore(parse_constraints(text), herbrand=herbrand)


# The battery store: A >= 3, X = A + A, Y = 2 * A.
BATTERY = "cp_>=(A,3), op_+(A,A,X), op_*(2,A,Y)"


class TestEntailmentBattery:
    def test_strict_bound(self):
        assert store(BATTERY).entails(parse_atom("cp_>(X,5.5)")) is TRUE

    def test_variable_equality(self):
        assert store(BATTERY).entails(parse_atom("X == Y")) is TRUE

    def test_lifted_equality(self):
        assert store(BATTERY).entails(parse_atom("c(X) == c(Y)")) is TRUE

    def test_list_equality(self):
        assert store(BATTERY).entails(parse_atom("[X,Y] == [Y,X]")) is TRUE

    def test_mutated_negative(self):
        # X can be exactly 6, so the strict bound at 6.1 fails
        assert store(BATTERY).entails(parse_atom("cp_>(X,6.1)")) is not TRUE

    def test_unrelated_variable_not_equal(self):
        assert store(BATTERY).entails(parse_atom("X == A")) is not TRUE


def test_satisfiable_and_witness():
    s = store(BATTERY)
    assert s.satisfiable() is TRUE
    eta = s.witness_valuation()
    assert satisfies_store(eta, s)


def test_unsatisfiable_numeric():
    assert store("cp_<(X,1), cp_>(X,2)").satisfiable() is FALSE


def test_constructor_clash():
    assert store("c(X) == d(Y)").satisfiable() is FALSE


def test_occurs_check():
    assert store("X == c(X)").satisfiable() is FALSE


def test_basic_clash():
    assert store("c(X) == 3").satisfiable() is FALSE


def test_nonlinear_is_unknown_not_wrong():
    s = store("op_*(X,Y,Z)")
    assert s.satisfiable() is not FALSE
    assert s.entails(parse_atom("cp_>(Z,0)")) is UNKNOWN


def test_pinned_factor_recovers_linearity():
    s = store("X == 3, op_*(X,Y,Z), cp_>=(Y,2)")
    assert s.entails(parse_atom("cp_>=(Z,6)")) is TRUE


def test_pi_equiv_and_canonical():
    s = store(BATTERY)
    assert s.pi_equiv(Var("X"), Var("Y")) is TRUE
    assert s.canonical_var("Y") == "X"
    assert s.canonical_form(parse_term("c(Y,X)")) == parse_term("c(X,X)")


def test_pi_equiv_reflexive_symmetric_transitive():
    s = store("X == Y, Y == Z")
    for a in ("X", "Y", "Z"):
        assert s.pi_equiv(Var(a), Var(a)) is TRUE
    assert s.pi_equiv(Var("X"), Var("Z")) is TRUE
    assert s.pi_equiv(Var("Z"), Var("X")) is TRUE


def test_pi_equiv_free_vars_differ():
    s = ConstraintStore((), herbrand=True)
    assert s.pi_equiv(Var("X"), Var("Y")) is FALSE
    assert s.pi_equiv(Var("X"), Var("X")) is TRUE


def test_canonical_form_idempotent():
    s = store("Z == c(X,Y), op_+(A,A,X), op_*(2,A,Y)")
    t = parse_term("c(c(Z,Y), X)")
    once = s.canonical_form(t)
    assert s.canonical_form(once) == once
    assert s.pi_equiv(t, once) is TRUE


def test_entails_monotone_under_extension():
    base = store(BATTERY)
    bigger = base.with_atoms(parse_constraints("cp_<=(A,10)"))
    for text in ("cp_>(X,5.5)", "X == Y"):
        assert base.entails(parse_atom(text)) is TRUE
        assert bigger.entails(parse_atom(text)) is TRUE


def test_free_variable_primitive_not_entailed():
    # a constructor value for X falsifies any primitive atom about X
    s = ConstraintStore(())
    assert s.entails(parse_atom("cp_<=(X,X)")) is not TRUE


def test_herbrand_rejects_primitives():
    with pytest.raises(Exception):
        store("cp_>=(A,3)", herbrand=True)


def test_store_equality_and_hash():
    a, b = store(BATTERY), store(BATTERY)
    assert a == b and hash(a) == hash(b)


rationals = st.integers(-5, 5).map(Fraction)


@given(rationals, rationals)
@settings(max_examples=50)
def test_ground_equation_decided(p, q):
    s = ConstraintStore([Equation(Basic(p), Basic(q))])
    assert s.satisfiable() is (TRUE if p == q else FALSE)


@given(rationals)
@settings(max_examples=50)
def test_substitution_lemma_valuations(v):
    # eta satisfies (pi sigma)  iff  (sigma then eta) satisfies pi
    pi = parse_atom("cp_>=(X,2)")
    sigma = {"X": Var("Y")}
    eta = {"Y": v}
    lhs = satisfies(eta, subst_constraint(pi, sigma))
    composed = {"X": v}
    assert lhs == satisfies(composed, pi)


@given(st.sampled_from(["cp_>(X,5.5)", "X == Y", "c(X) == c(Y)"]),
       st.sampled_from(["B", "C", "X"]))
@settings(max_examples=30)
def test_substitution_lemma_entailment(pi_text, target):
    # renaming substitutions preserve entailment
    sigma = {"X": Var(target), "Y": Var(target) if target != "X" else Var("Y")}
    base = store(BATTERY)
    assert base.entails(parse_atom(pi_text)) is TRUE
    mapped = base.subst(sigma)
    assert mapped.entails(subst_constraint(parse_atom(pi_text), sigma)) \
        is not FALSE
