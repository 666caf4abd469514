from fractions import Fraction

import hypothesis.strategies as st
from hypothesis import given, settings

from sqclp.terms import (
    App,
    Basic,
    Equation,
    Var,
    apply_subst,
    compose,
    extend,
    is_ground,
    match,
    min_var,
    positions,
    replace,
    size,
    subterm,
    variables,
)

X, Y, Z = Var("X"), Var("Y"), Var("Z")


def c(*args):
    return App("c", args)


def f(*args):
    return App("f", args)


terms = st.recursive(
    st.sampled_from([X, Y, Z, App("a"), App("b"), Basic(Fraction(1))]),
    lambda sub: st.builds(lambda a, b: App("c", (a, b)), sub, sub)
    | st.builds(lambda a: App("f", (a,)), sub),
    max_leaves=12,
)


def test_positions_and_subterms():
    t = c(f(X), App("a"))
    assert () in positions(t)
    assert subterm(t, (1, 1)) == X
    assert subterm(t, (2,)) == App("a")
    assert replace(t, (1,), Y) == c(Y, App("a"))


def test_size_and_variables():
    t = c(f(X), c(Y, X))
    assert size(t) == 6
    assert variables(t) == {"X", "Y"}
    assert not is_ground(t)
    assert is_ground(App("a"))


@given(terms)
def test_positions_contain_root_and_match_size(t):
    ps = positions(t)
    assert () in ps
    assert len(ps) == size(t)


@given(terms)
def test_subterm_replace_roundtrip(t):
    for p in positions(t):
        assert replace(t, p, subterm(t, p)) == t


def test_apply_subst_composition():
    sigma = {"X": f(Y)}
    tau = {"Y": App("a")}
    t = c(X, Y)
    assert apply_subst(apply_subst(t, sigma), tau) == apply_subst(
        t, compose(sigma, tau)
    )


@given(terms, terms)
@settings(max_examples=60)
def test_compose_agrees_pointwise(t, s):
    sigma = {"X": s}
    tau = {"Y": App("b")}
    assert apply_subst(apply_subst(t, sigma), tau) == apply_subst(
        t, compose(sigma, tau)
    )


def test_match_finds_instance():
    pat = c(X, f(Y))
    tgt = c(App("a"), f(App("b")))
    got = match(pat, tgt)
    assert got == {"X": App("a"), "Y": App("b")}
    assert match(c(X, X), c(App("a"), App("b"))) is None


@given(terms)
def test_match_self_is_trivial_on_linear_ground(t):
    if is_ground(t):
        assert match(t, t) == {}


def test_extend_fills_variable_positions():
    # positions with variables take the other term's subterm
    assert extend(c(X, App("a")), c(App("b"), App("b"))) == c(App("b"), App("a"))
    # disagreeing rigid structure is kept from the first term
    assert extend(App("a"), App("b")) == App("a")
    assert extend(X, f(Y)) == f(Y)


@given(terms, terms)
@settings(max_examples=60)
def test_extend_size_grows(t, s):
    assert size(extend(t, s)) >= size(t)


def test_equation_variables():
    assert variables(Equation(c(X, Y), Z)) == {"X", "Y", "Z"}


def test_min_var_is_lexicographic():
    assert min_var(["Y", "X", "Z"]) == "X"
