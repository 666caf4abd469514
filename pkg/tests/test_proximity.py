from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from sqclp.constraints import FALSE, TRUE, ConstraintStore
from sqclp.program import parse_constraints, parse_term
from sqclp.proximity import (
    ProximityError,
    ProximityRelation,
    atom_prox_modulo,
    close_at,
    close_at_modulo,
    identity_relation,
    is_similarity,
    prox_degree_modulo,
    term_prox,
    validate_admissible,
)
from sqclp.qualdom import U
from sqclp.terms import App, Equation, Var, apply_subst, extend

F = Fraction


@pytest.fixture()
def rel():
    # c' ~ c = 0.8, c ~ c'' = 0.8, c' ~ c'' = 0.6 over binary constructors
    return ProximityRelation(U, [
        ("c'", "c", F(4, 5)),
        ("c", "c''", F(4, 5)),
        ("c'", "c''", F(3, 5)),
    ])


@pytest.fixture()
def pi(rel):
    return ConstraintStore(
        parse_constraints("op_+(A,A,X), op_*(2,A,Y), Z == c(X,Y)")
    )


def test_relation_reflexive_symmetric(rel):
    assert rel.prox("c", "c") == U.top
    assert rel.prox("c", "c'") == rel.prox("c'", "c") == F(4, 5)
    assert rel.prox("c", "unrelated") == U.bottom


def test_identity_relation():
    rel = identity_relation(U)
    assert rel.is_identity()
    assert rel.prox("a", "a") == U.top
    assert rel.prox("a", "b") == U.bottom


def test_self_entries_must_be_top():
    with pytest.raises(ProximityError):
        ProximityRelation(U, [("c", "c", F(1, 2))])


def test_admissibility_violations():
    sig = {"c": ("ctor", 2), "d": ("ctor", 1), "p": ("pred", 1)}
    rel = ProximityRelation(U, [("c", "d", F(1, 2))])
    assert any("arity mismatch" in v for v in validate_admissible(rel, sig))
    rel = ProximityRelation(U, [("c", "p", F(1, 2))])
    assert any("category mismatch" in v
               for v in validate_admissible(rel, sig))
    rel = ProximityRelation(U, [("op_+", "op_-", F(1, 2))])
    assert any("primitive pair" in v for v in validate_admissible(rel, sig))


def test_similarity_requires_transitivity(rel):
    # 0.8 /\ 0.8 = 0.8 > 0.6 = prox(c',c'') breaks the triangle rule
    assert not is_similarity(rel, ["c", "c'", "c''"])
    trans = ProximityRelation(U, [
        ("c'", "c", F(4, 5)),
        ("c", "c''", F(4, 5)),
        ("c'", "c''", F(4, 5)),
    ])
    assert is_similarity(trans, ["c", "c'", "c''"])


def test_term_prox_structural(rel):
    t = parse_term("c'(X,X)")
    s = parse_term("c(X,X)")
    assert term_prox(rel, t, s) == F(4, 5)
    assert close_at(rel, F(7, 10), t, s)
    assert not close_at(rel, F(9, 10), t, s)
    assert term_prox(rel, Var("X"), Var("Y")) == U.bottom
    assert term_prox(rel, Var("X"), Var("X")) == U.top


class TestPiProximityBattery:
    """The four verdicts over Pi = {X = A+A, Y = 2A, Z == c(X,Y)}."""

    def test_item1_plain_equivalence(self, rel, pi):
        assert pi.pi_equiv(parse_term("c(Y,X)"), Var("Z")) is TRUE
        assert pi.pi_equiv(parse_term("c'(Y,X)"), Var("Z")) is FALSE

    def test_item2_close_modulo(self, rel, pi):
        assert close_at_modulo(
            rel, F(7, 10), pi, parse_term("c'(Y,X)"), Var("Z")
        ) is TRUE

    def test_item3_close_modulo_other_side(self, rel, pi):
        assert close_at_modulo(
            rel, F(7, 10), pi, Var("Z"), parse_term("c''(X,Y)")
        ) is TRUE

    def test_item4_fails_across(self, rel, pi):
        assert close_at_modulo(
            rel, F(7, 10), pi, parse_term("c'(Y,X)"), parse_term("c''(X,Y)")
        ) is FALSE

    def test_best_degrees(self, rel, pi):
        assert prox_degree_modulo(
            rel, pi, parse_term("c'(Y,X)"), Var("Z")
        ) == F(4, 5)
        assert prox_degree_modulo(
            rel, pi, parse_term("c'(Y,X)"), parse_term("c''(X,Y)")
        ) == F(3, 5)


def test_empty_store_degenerates_to_term_prox(rel):
    empty = ConstraintStore(())
    for a, b in [("c'(X,X)", "c(X,X)"), ("c(X,X)", "c(X,X)"),
                 ("c'(X,X)", "c''(X,X)")]:
        t, s = parse_term(a), parse_term(b)
        assert prox_degree_modulo(rel, empty, t, s) == term_prox(rel, t, s)


def test_identity_relation_degenerates_to_pi_equiv(pi):
    rel = identity_relation(U)
    t, s = parse_term("c(Y,X)"), Var("Z")
    assert close_at_modulo(rel, F(1, 2), pi, t, s) is pi.pi_equiv(t, s)
    t2 = parse_term("c'(Y,X)")
    assert close_at_modulo(rel, F(1, 2), pi, t2, s) is pi.pi_equiv(t2, s)


def test_close_at_modulo_downward_closed(rel, pi):
    t, s = parse_term("c'(Y,X)"), Var("Z")
    assert close_at_modulo(rel, F(4, 5), pi, t, s) is TRUE
    for lam in (F(3, 5), F(1, 2), F(1, 10)):
        assert close_at_modulo(rel, lam, pi, t, s) is TRUE


def test_close_at_modulo_rejects_bottom_level(rel, pi):
    with pytest.raises(ProximityError):
        close_at_modulo(rel, U.bottom, pi, Var("X"), Var("Y"))


def test_invariance_under_pi_equivalence(rel, pi):
    # X and Y are interchangeable under the store
    a = prox_degree_modulo(rel, pi, parse_term("c'(Y,X)"), Var("Z"))
    b = prox_degree_modulo(rel, pi, parse_term("c'(X,Y)"), Var("Z"))
    assert a == b


def test_atom_prox_modulo(rel, pi):
    d, exact = atom_prox_modulo(
        rel, pi,
        Equation(parse_term("c'(Y,X)"), Var("Z")),
        Equation(parse_term("c'(Y,X)"), Var("Z")),
    )
    assert d == U.top and exact


small_terms = st.recursive(
    st.sampled_from([Var("X"), Var("Y"), App("a"), App("b")]),
    lambda sub: st.builds(lambda l, r: App("c", (l, r)), sub, sub)
    | st.builds(lambda l, r: App("c'", (l, r)), sub, sub),
    max_leaves=6,
)


@given(small_terms, small_terms)
@settings(max_examples=80)
def test_term_prox_symmetric(t, s):
    rel = ProximityRelation(U, [("c'", "c", F(4, 5)), ("a", "b", F(1, 2))])
    assert term_prox(rel, t, s) == term_prox(rel, s, t)


@given(small_terms, small_terms, small_terms)
@settings(max_examples=60)
def test_proximity_preservation(t, t2, s):
    rel = ProximityRelation(U, [("c'", "c", F(4, 5)), ("a", "b", F(1, 2))])
    lam = term_prox(rel, t, t2)
    if lam != U.bottom:
        assert close_at(rel, lam, extend(t, s), extend(t2, s))


@given(small_terms, small_terms)
@settings(max_examples=60)
def test_substitution_lemma_for_closeness(t, s):
    rel = ProximityRelation(U, [("c'", "c", F(4, 5)), ("a", "b", F(1, 2))])
    empty = ConstraintStore((), herbrand=True)
    sigma = {"X": App("a"), "Y": App("b")}
    lam = term_prox(rel, t, s)
    if lam != U.bottom:
        got = close_at_modulo(
            rel, lam, empty, apply_subst(t, sigma), apply_subst(s, sigma)
        )
        assert got is not FALSE
