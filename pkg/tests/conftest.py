import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sqclp.program import parse_constraints, parse_program

ROOT = Path(__file__).resolve().parent.parent
PROGRAMS = ROOT / "programs"

RUNNING_TEXT = (PROGRAMS / "running.sqclp").read_text()
PLAYWRIGHTS_TEXT = (PROGRAMS / "playwrights.sqclp").read_text()


@pytest.fixture(scope="session")
def running():
    return parse_program(RUNNING_TEXT)


@pytest.fixture(scope="session")
def playwrights():
    return parse_program(PLAYWRIGHTS_TEXT)


@pytest.fixture()
def pi_run(running):
    return running.store(parse_constraints("op_+(A,A,Y), op_*(2,A,X)"))


# ---------------------------------------------------------------------------
# Random equality-only programs for the cross-check corpora

_QDOMS = ("U", "B", "W")


def random_program_text(rng: random.Random) -> str:
    qdom = rng.choice(_QDOMS)
    preds = ["p", "q", "r"][: rng.randint(2, 3)]
    consts = ["a", "b"]
    lines = ["#qdom %s" % qdom, "#cdom H", "constructor a/0", "constructor b/0", "constructor f/1"]
    for p in preds:
        lines.append("predicate %s/1" % p)

    def degree() -> str:
        if qdom == "B":
            return "true"
        if qdom == "W":
            return str(rng.randint(1, 4))
        return "%d/10" % rng.randint(5, 10)

    # proximity entries between symbols of equal category and arity
    if rng.random() < 0.7:
        lines.append("~(a, b) = %s" % degree())
    if len(preds) >= 2 and rng.random() < 0.7:
        x, y = rng.sample(preds, 2)
        lines.append("~(%s, %s) = %s" % (x, y, degree()))

    def term(depth: int) -> str:
        roll = rng.random()
        if depth > 0 and roll < 0.35:
            return "f(%s)" % term(depth - 1)
        if roll < 0.8:
            return rng.choice(consts)
        return "X"

    for _ in range(rng.randint(2, 5)):
        head = "%s(%s)" % (rng.choice(preds), term(1))
        body = []
        for _ in range(rng.randint(0, 2)):
            w = "?" if rng.random() < 0.6 else degree()
            body.append("%s(%s)#%s" % (rng.choice(preds), term(1), w))
        arrow = "<-%s-" % degree()
        lines.append(
            "%s %s %s" % (head, arrow, ", ".join(body)) if body
            else "%s %s" % (head, arrow)
        )
    return "\n".join(lines) + "\n"


def corpus(seed: int, count: int):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        text = random_program_text(rng)
        prog = parse_program(text)
        if prog.clauses:
            out.append(prog)
    return out
