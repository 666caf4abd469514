import dataclasses
from fractions import Fraction

import pytest

from sqclp.constraints import FALSE, TRUE, ConstraintStore
from sqclp.program import parse_atom, parse_program
from sqclp.semantics import (
    Interpretation,
    ProofTree,
    QcAtom,
    check_proof,
    derive,
    derive_candidates,
    is_prefixpoint,
    make_universe,
    proof_from_json,
    proof_stats,
    proof_to_json,
    qc_entails,
    qcatom_from_json,
    qcatom_to_json,
    tp_lfp,
    tp_step,
    valid_in,
)

F = Fraction


def qc(prog, atom_text, degree_text, store=None):
    return QcAtom(
        parse_atom(atom_text),
        prog.qdom.parse(degree_text),
        store if store is not None else prog.store([]),
    )


def test_observability(running, pi_run):
    dom = running.qdom
    assert qc(running, "p(X)", "0.5").observable(dom)
    assert not qc(running, "p(X)", "0").observable(dom)
    bad = running.store([parse_atom("cp_<(X,1)"), parse_atom("cp_>(X,2)")])
    assert bad.satisfiable() is FALSE
    assert not qc(running, "p(X)", "0.5", bad).observable(dom)


def test_qc_entails_weakening(running):
    dom = running.qdom
    strong = qc(running, "p(c(X))", "0.9")
    weak = qc(running, "p(c(X))", "0.5")
    assert qc_entails(dom, strong, weak) is TRUE
    assert qc_entails(dom, weak, strong) is FALSE


def test_qc_entails_instantiation(running):
    dom = running.qdom
    general = qc(running, "p(c(X))", "0.9")
    instance = qc(running, "p(c(a))", "0.9")
    assert qc_entails(dom, general, instance) is TRUE
    assert qc_entails(dom, instance, general) is FALSE


class TestWorkedProofTree:
    """p'(c'(Y), c(X)) # 0.8 under {Y = A+A, X = 2A}: six inference steps,
    two of them through program clauses."""

    def phi(self, running, pi_run):
        return qc(running, "p'(c'(Y), c(X))", "0.8", pi_run)

    def test_derive_and_check(self, running, pi_run):
        tree = derive(running, self.phi(running, pi_run))
        assert tree is not None
        assert check_proof(running, tree) is TRUE
        stats = proof_stats(tree)
        assert (stats.size, stats.defined_steps) == (6, 2)

    def test_overclaimed_root_degree_rejected(self, running, pi_run):
        tree = derive(running, self.phi(running, pi_run))
        bumped = dataclasses.replace(
            tree,
            conclusion=dataclasses.replace(
                tree.conclusion, degree=F(19, 20)
            ),
        )
        assert check_proof(running, bumped) is not TRUE

    def test_json_roundtrip(self, running, pi_run):
        tree = derive(running, self.phi(running, pi_run))
        data = proof_to_json(running.qdom, tree)
        again = proof_from_json(running, data)
        assert check_proof(running, again) is TRUE
        assert proof_to_json(running.qdom, again) == data


def test_single_constraint_inference_node(running):
    store = running.store(
        [parse_atom("cp_>=(A,3)"), parse_atom("op_+(A,A,X)"),
         parse_atom("op_*(2,A,Y)")]
    )
    phi = qc(running, "cp_>(X,5.5)", "0.7", store)
    tree = ProofTree(phi, "SQPA")
    assert check_proof(running, tree) is TRUE
    unsupported = ProofTree(qc(running, "cp_>(X,6.5)", "0.7", store), "SQPA")
    assert check_proof(running, unsupported) is not TRUE


def test_playwrights_walkthrough_degree(playwrights):
    phi = qc(playwrights, "goodWork(king_liar)", "(0.6,5)")
    tree = derive(playwrights, phi)
    assert tree is not None
    assert check_proof(playwrights, tree) is TRUE
    # a strictly better claim at the same binding is not derivable
    assert derive(playwrights, qc(playwrights, "goodWork(king_liar)", "(0.6,4)")) \
        is None


def test_playwrights_maximal_candidates(playwrights):
    store = playwrights.store([])
    uni = make_universe(playwrights, store)
    cands = derive_candidates(
        playwrights, parse_atom("goodWork(king_liar)"), store, 6, uni
    )
    assert [d for d, _, _ in cands] == [(F(3, 5), F(5))]


P123 = """#qdom U
#cdom H
~(p1, p2) = 0.9
~(p2, p3) = 0.9
~(p1, p3) = 0.4
p1 <-1-
"""


def test_closing_counterexample():
    prog = parse_program(P123)
    assert derive(prog, qc(prog, "p2", "0.9")) is not None
    assert derive(prog, qc(prog, "p3", "0.9")) is None
    assert derive(prog, qc(prog, "p3", "0.4")) is not None


SMALL = """#qdom U
#cdom H
constructor a/0
constructor b/0
~(a, b) = 0.5
p(a) <-0.9-
q(X) <-0.8- p(X)#?
"""


def test_small_herbrand_lfp():
    prog = parse_program(SMALL)
    store = prog.store([])
    uni = make_universe(prog, store)
    interp, iters, converged = tp_lfp(prog, store, uni)
    assert converged
    got = {
        (str(g.atom), g.degree) for g in interp.generators
    }
    assert ("p(a)", F(9, 10)) in got
    assert ("p(b)", F(1, 2)) in got  # via the head equation b == a at 0.5
    assert ("q(a)", F(18, 25)) in got  # 0.8 * 0.9
    assert ("q(b)", F(2, 5)) in got  # 0.8 * 0.5
    assert is_prefixpoint(prog, interp, store, uni)


def test_lfp_agrees_with_derivation():
    prog = parse_program(SMALL)
    store = prog.store([])
    uni = make_universe(prog, store)
    interp, _, _ = tp_lfp(prog, store, uni)
    for g in interp.generators:
        phi = QcAtom(g.atom, g.degree, store)
        assert derive(prog, phi) is not None, g
        assert valid_in(prog, interp, phi) is TRUE


def test_tp_step_monotone_until_fixpoint():
    prog = parse_program(SMALL)
    store = prog.store([])
    uni = make_universe(prog, store)
    i0 = Interpretation()
    i1 = tp_step(prog, i0, store, uni)
    i2 = tp_step(prog, i1, store, uni)
    assert len(i1.generators) <= len(i2.generators)
    for g in i1.generators:
        assert valid_in(prog, i2, QcAtom(g.atom, g.degree, store)) is TRUE


def test_qcatom_json_roundtrip(running, pi_run):
    phi = qc(running, "p'(c'(Y), c(X))", "0.8", pi_run)
    data = qcatom_to_json(running.qdom, phi)
    again = qcatom_from_json(running, data)
    assert again.atom == phi.atom
    assert again.degree == phi.degree
    assert again.store == phi.store


def test_universe_contains_store_vars_and_constants(running, pi_run):
    uni = make_universe(running, pi_run, extra_vars=["Z"])
    names = {str(t) for t in uni.terms()}
    assert {"A", "X", "Y", "Z"} <= names
    assert any(s.startswith("c(") for s in names)
