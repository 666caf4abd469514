from fractions import Fraction

import pytest

from sqclp.constraints import TRUE
from sqclp.engine import (
    EngineError,
    GoalSolution,
    SolveOptions,
    brute_ground_solutions,
    goal_vars,
    is_solution,
    solve,
    subsumes,
)
from sqclp.program import parse_constraints, parse_goal, parse_program, parse_term
from sqclp.semantics import make_universe

F = Fraction


def works_goal(playwrights):
    return parse_goal("goodWork(X)#W | W >= (0.55,30)", playwrights.qdom)


def test_playwrights_answers(playwrights):
    goal = works_goal(playwrights)
    sols = solve(playwrights, goal)
    by_x = {dict(s.sigma)["X"]: dict(s.mu)["W"] for s in sols}
    assert by_x[parse_term("king_liar")] == (F(3, 5), F(5))
    assert by_x[parse_term("king_lear")] == (F(27, 40), F(4))
    assert len(sols) == 2
    for s in sols:
        assert is_solution(playwrights, goal, s) is TRUE


def test_playwrights_threshold_filters(playwrights):
    goal = parse_goal("goodWork(X)#W | W >= (0.65,10)", playwrights.qdom)
    sols = solve(playwrights, goal)
    assert {dict(s.sigma)["X"] for s in sols} == {parse_term("king_lear")}


def test_running_example_answer(running):
    seed = running.store(parse_constraints("op_+(A,A,Y), op_*(2,A,X)"))
    goal = parse_goal("p'(c'(Y), Z)#W | W >= 0.75", running.qdom)
    sols = solve(running, goal, SolveOptions(store_seed=seed))
    assert any(
        dict(s.sigma) == {"Z": parse_term("c(X)")}
        and dict(s.mu)["W"] == F(4, 5)
        for s in sols
    )
    for s in sols:
        assert is_solution(running, goal, s) is TRUE


def test_solution_soundness_playwrights(playwrights):
    goal = works_goal(playwrights)
    for s in solve(playwrights, goal):
        assert is_solution(playwrights, goal, s) is TRUE


def test_is_solution_rejects_wrong_degree(playwrights):
    goal = works_goal(playwrights)
    good = solve(playwrights, goal)[0]
    bad = GoalSolution(good.sigma, (("W", (F(99, 100), F(1))),), good.store)
    assert is_solution(playwrights, goal, bad) is not TRUE


def test_subsumption(playwrights):
    goal = works_goal(playwrights)
    sols = solve(playwrights, goal)
    liar = next(s for s in sols if dict(s.sigma)["X"] == parse_term("king_liar"))
    # the computed answer covers the weaker ground claim at (0.55,30)
    ground = GoalSolution(
        (("X", parse_term("king_liar")),),
        (("W", (F(11, 20), F(30))),),
        playwrights.store([]),
    )
    assert subsumes(liar, ground, goal, playwrights) is TRUE
    # and itself
    self_ground = GoalSolution(liar.sigma, liar.mu, playwrights.store([]))
    assert subsumes(liar, self_ground, goal, playwrights) is TRUE
    # but not a stronger claim
    better = GoalSolution(
        (("X", parse_term("king_liar")),),
        (("W", (F(9, 10), F(1))),),
        playwrights.store([]),
    )
    assert subsumes(liar, better, goal, playwrights) is not TRUE


def test_subsumes_requires_empty_ground_store(playwrights):
    goal = works_goal(playwrights)
    sol = solve(playwrights, goal)[0]
    with_store = GoalSolution(
        sol.sigma, sol.mu,
        playwrights.store(parse_constraints("cp_>=(V,1)")),
    )
    with pytest.raises(EngineError):
        subsumes(sol, with_store, goal, playwrights)


def test_brute_ground_matches_solve_on_playwrights(playwrights):
    goal = works_goal(playwrights)
    sols = solve(playwrights, goal)
    uni = make_universe(playwrights, playwrights.store([]))
    ground = brute_ground_solutions(playwrights, goal, uni)
    assert ground, "expected ground solutions"
    for g in ground:
        assert any(subsumes(s, g, goal, playwrights) is TRUE for s in sols), g


def test_brute_empty_program():
    prog = parse_program("#qdom U\n#cdom H\npredicate p/1\nconstructor a/0\n")
    goal = parse_goal("p(X)#W", prog.qdom)
    uni = make_universe(prog, prog.store([]))
    assert brute_ground_solutions(prog, goal, uni) == []


CLASSICAL = """#qdom B
#cdom H
constructor a/0
constructor b/0
edge(a, b) <-true-
path(X, Y) <-true- edge(X, Y)#?
path(X, Z) <-true- edge(X, Y)#?, path(Y, Z)#?
"""


def classical_closure():
    # independent transitive-closure oracle
    edges = {("a", "b")}
    paths = set(edges)
    changed = True
    while changed:
        changed = False
        for (x, y) in list(paths):
            for (u, v) in edges:
                if v == x and (u, y) not in paths:
                    paths.add((u, y))
                    changed = True
    return paths


def test_qualification_free_matches_classical():
    prog = parse_program(CLASSICAL)
    goal = parse_goal("path(X, Y)#W", prog.qdom)
    uni = make_universe(prog, prog.store([]))
    ground = brute_ground_solutions(prog, goal, uni)
    got = {
        (str(dict(g.sigma)["X"]), str(dict(g.sigma)["Y"]))
        for g in ground
    }
    assert got == classical_closure()


def test_goal_vars_order(playwrights):
    goal = parse_goal("goodWork(X)#W", playwrights.qdom)
    assert goal_vars(goal) == ["X"]


def test_deterministic_output(playwrights):
    goal = works_goal(playwrights)
    a = solve(playwrights, goal)
    b = solve(playwrights, goal)
    assert a == b
