from fractions import Fraction

import pytest

from sqclp.program import (
    ParseError,
    classify_clause,
    format_atom,
    format_clause,
    format_goal,
    format_program,
    format_term,
    parse_atom,
    parse_constraints,
    parse_goal,
    parse_program,
    parse_term,
)
from sqclp.qualdom import ANY, U, parse_domain
from sqclp.terms import App, Basic, Defined, Equation, Primitive, Var

F = Fraction


def test_parse_term_shapes():
    assert parse_term("X") == Var("X")
    assert parse_term("c(X, a)") == App("c", (Var("X"), App("a")))
    assert parse_term("3/4") == Basic(F(3, 4))
    assert parse_term("-2") == Basic(F(-2))
    assert parse_term("(X, Y)") == App("pair", (Var("X"), Var("Y")))


def test_parse_list_sugar():
    assert parse_term("[]") == App("nil")
    lst = parse_term("[X, Y]")
    assert lst == App("cons", (Var("X"), App("cons", (Var("Y"), App("nil")))))
    assert parse_term("[X | T]") == App("cons", (Var("X"), Var("T")))


def test_parse_atom_kinds():
    assert isinstance(parse_atom("p(X)"), Defined)
    assert isinstance(parse_atom("op_+(A,A,X)"), Primitive)
    assert isinstance(parse_atom("X == c(Y)"), Equation)
    with pytest.raises(ParseError):
        parse_atom("op_+(A,A)")  # wrong primitive arity


def test_parse_constraints_list():
    atoms = parse_constraints("op_+(A,A,Y), op_*(2,A,X)")
    assert len(atoms) == 2
    assert parse_constraints("") == []


def test_term_format_roundtrip():
    for text in ("c(X, a)", "[X, Y]", "[X | T]", "(a, b)", "3/4", "-2",
                 "f(c(X, 1/2))"):
        t = parse_term(text)
        assert parse_term(format_term(t)) == t


def test_running_program_parses(running):
    assert running.qdom.name == "U"
    assert running.cdom == "R"
    assert len(running.clauses) == 3
    assert running.prox.prox("c", "c'") == F(9, 10)
    assert running.prox.prox("p", "p'") == F(4, 5)


def test_playwrights_program_parses(playwrights):
    assert playwrights.qdom.name == "UxW"
    assert playwrights.clauses[0].alpha == (F(3, 4), F(3))
    r1 = playwrights.clauses[0]
    assert r1.body[0][1] == (F(1, 2), F(100))  # famousAuthor#(0.5,100)
    assert r1.body[1][1] is ANY  # wrote#?
    # the proximity-only symbol inherits the partner's signature
    assert playwrights.signature["king_liar"] == ("ctor", 0)


def test_program_format_roundtrip(running, playwrights):
    for prog in (running, playwrights):
        again = parse_program(format_program(prog))
        assert format_program(again) == format_program(prog)
        assert len(again.clauses) == len(prog.clauses)


def test_clause_labels(running):
    assert [c.label for c in running.clauses] == ["R1", "R2", "R3"]


def test_classify_clause(running):
    flags = classify_clause(running.qdom, running.clauses[0])
    assert flags["threshold_free"]


def test_goal_parsing(playwrights):
    goal = parse_goal("goodWork(X)#W | W >= (0.55,30)", playwrights.qdom)
    assert len(goal.items) == 1
    item = goal.items[0]
    assert item.qvar == "W"
    assert item.threshold == (F(11, 20), F(30))
    assert parse_goal(format_goal(playwrights.qdom, goal), playwrights.qdom)


def test_goal_default_threshold(running):
    goal = parse_goal("p(X)#W", running.qdom)
    assert goal.items[0].threshold is ANY


def test_goal_rejects_duplicate_qvar(running):
    with pytest.raises(ParseError):
        parse_goal("p(X)#W, q(Y)#W", running.qdom)


def test_goal_rejects_qvar_term_clash(running):
    with pytest.raises(ParseError):
        parse_goal("p(W)#W", running.qdom)


def test_attenuation_bottom_rejected():
    with pytest.raises(ParseError):
        parse_program("#qdom U\n#cdom H\np(a) <-0-\n")


def test_primitive_atoms_need_real_domain():
    with pytest.raises(ParseError):
        parse_program("#qdom U\n#cdom H\np(X) <-1- op_+(X,X,Y)#?\n")


def test_primitive_proximity_pair_rejected():
    with pytest.raises(ParseError) as err:
        parse_program("#qdom U\n#cdom R\n~(op_+, op_-) = 0.5\np(a) <-1-\n")
    assert "primitive pair" in str(err.value)


def test_arity_mismatch_in_proximity_rejected():
    text = "#qdom U\n#cdom H\nconstructor a/0\nconstructor f/1\n" \
           "~(a, f) = 0.5\np(a) <-1-\n"
    with pytest.raises(ParseError):
        parse_program(text)


def test_default_directives():
    prog = parse_program("p(a) <-1-\n")
    assert prog.qdom.name == "U"
    assert prog.cdom == "R"


def test_comments_and_blank_lines():
    prog = parse_program("% a comment\n\np(a) <-1-\n")
    assert len(prog.clauses) == 1


def test_format_atom_stable():
    a = parse_atom("p(c(X), [Y])")
    assert parse_atom(format_atom(a)) == a
