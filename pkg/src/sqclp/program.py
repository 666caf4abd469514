"""Program and goal syntax.

A program file is line-oriented: directives (`#qdom U`, `#cdom R`),
signature declarations (`constructor c/1`, `predicate p/2`), proximity
entries (`~(c, c') = 0.9`) and clauses (`head <-0.9- body`), with `%` line
comments.  Undeclared symbols are auto-declared with their inferred arity
unless strict mode is requested.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from . import qualdom
from .constraints import ConstraintStore
from .proximity import ProximityError, ProximityRelation, validate_admissible
from .qualdom import ANY, INF, QualDomain, QualValue, Threshold
from .terms import (
    App,
    Atom,
    Basic,
    BUILTIN_CONSTRUCTORS,
    Defined,
    Equation,
    Primitive,
    PRIMITIVE_PREDS,
    Term,
    Var,
    format_rational,
)


class ParseError(Exception):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


@dataclass(frozen=True)
class Clause:
    head: Defined
    alpha: QualValue
    body: tuple[tuple[Atom, Threshold], ...]
    label: str = ""


@dataclass(frozen=True)
class GoalItem:
    atom: Atom
    qvar: str
    threshold: Threshold


@dataclass(frozen=True)
class Goal:
    items: tuple[GoalItem, ...]


@dataclass
class Program:
    qdom: QualDomain
    cdom: str  # "R" or "H"
    signature: dict[str, tuple[str, int]]
    prox: ProximityRelation
    clauses: tuple[Clause, ...]

    def store(self, atoms=()) -> ConstraintStore:
        return ConstraintStore(atoms, herbrand=self.cdom == "H")

    def constructors(self) -> dict[str, int]:
        return {n: a for n, (c, a) in self.signature.items() if c == "ctor"}

    def constants(self) -> list[Term]:
        out: list[Term] = []
        for clause in self.clauses:
            for t in _clause_terms(clause):
                out.extend(_basics(t))
        seen: list[Term] = []
        for t in out:
            if t not in seen:
                seen.append(t)
        return seen


def _clause_terms(clause: Clause):
    yield from clause.head.args
    for atom, _ in clause.body:
        if isinstance(atom, Equation):
            yield atom.lhs
            yield atom.rhs
        else:
            yield from atom.args


def _basics(t: Term):
    if isinstance(t, Basic):
        yield t
    elif isinstance(t, App):
        for a in t.args:
            yield from _basics(a)
        if not t.args:
            yield t


def classify_clause(dom: QualDomain, clause: Clause) -> dict[str, bool]:
    return {
        "attenuation_free": clause.alpha == dom.top,
        "threshold_free": all(w is ANY for _, w in clause.body),
        "qualification_free": clause.alpha == dom.top
        and all(w is ANY for _, w in clause.body),
        "constraint_free": all(
            isinstance(a, Defined) for a, _ in clause.body
        ),
    }


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>%.*)
    | (?P<number>\d+(\.\d+)?(/\d+)?)
    | (?P<name>op_[+\-*]|cp_<=|cp_>=|cp_<|cp_>|[a-z][A-Za-z0-9_]*'*)
    | (?P<var>[A-Z_][A-Za-z0-9_]*'*)
    | (?P<op><-|==|>=|~|\#|\?|\||[()\[\],=./-])
    """,
    re.VERBOSE,
)


def _tokenize(text: str, line: int) -> list[tuple[str, str]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character %r" % text[pos], line)
        pos = m.end()
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            continue
        value = m.group()
        out.append((kind if kind != "op" else value, value))
    return out


class _Tokens:
    def __init__(self, toks: list[tuple[str, str]], line: int):
        self.toks = toks
        self.pos = 0
        self.line = line

    def peek(self) -> Optional[tuple[str, str]]:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of line", self.line)
        self.pos += 1
        return tok

    def expect(self, kind: str) -> str:
        tok = self.next()
        if tok[0] != kind:
            raise ParseError("expected %r, found %r" % (kind, tok[1]), self.line)
        return tok[1]

    def accept(self, kind: str) -> bool:
        tok = self.peek()
        if tok is not None and tok[0] == kind:
            self.pos += 1
            return True
        return False

    def at_end(self) -> bool:
        return self.pos >= len(self.toks)

    def error(self, msg: str):
        raise ParseError(msg, self.line)


# ---------------------------------------------------------------------------
# Parser

def _parse_number(text: str) -> Fraction:
    return Fraction(text)


def _parse_qual_literal(ts: _Tokens) -> QualValue:
    tok = ts.peek()
    if tok is None:
        ts.error("expected a qualification value")
    kind, value = tok
    if kind == "number":
        ts.next()
        return Fraction(value)
    if kind == "-" :
        ts.error("qualification values are non-negative")
    if kind == "name" and value in ("true", "false", "inf"):
        ts.next()
        return {"true": True, "false": False, "inf": INF}[value]
    if kind == "(":
        ts.next()
        left = _parse_qual_literal(ts)
        ts.expect(",")
        right = _parse_qual_literal(ts)
        ts.expect(")")
        return (left, right)
    ts.error("bad qualification value %r" % value)


def _parse_term(ts: _Tokens) -> Term:
    tok = ts.peek()
    if tok is None:
        ts.error("expected a term")
    kind, value = tok
    if kind == "var":
        ts.next()
        return Var(value)
    if kind == "number":
        ts.next()
        return Basic(Fraction(value))
    if kind == "-":
        ts.next()
        return Basic(-Fraction(ts.expect("number")))
    if kind == "name":
        ts.next()
        args: tuple[Term, ...] = ()
        if ts.accept("("):
            parts = [_parse_term(ts)]
            while ts.accept(","):
                parts.append(_parse_term(ts))
            ts.expect(")")
            args = tuple(parts)
        return App(value, args)
    if kind == "(":
        ts.next()
        first = _parse_term(ts)
        ts.expect(",")
        second = _parse_term(ts)
        ts.expect(")")
        return App("pair", (first, second))
    if kind == "[":
        ts.next()
        items: list[Term] = []
        if not ts.accept("]"):
            items.append(_parse_term(ts))
            while ts.accept(","):
                items.append(_parse_term(ts))
            tail: Term = App("nil", ())
            if ts.accept("|"):
                tail = _parse_term(ts)
            ts.expect("]")
            out = tail
            for item in reversed(items):
                out = App("cons", (item, out))
            return out
        return App("nil", ())
    ts.error("expected a term, found %r" % value)


def _parse_atom(ts: _Tokens) -> Atom:
    t = _parse_term(ts)
    if ts.accept("=="):
        return Equation(t, _parse_term(ts))
    if isinstance(t, App):
        if t.ctor in PRIMITIVE_PREDS:
            if len(t.args) != PRIMITIVE_PREDS[t.ctor]:
                ts.error("bad arity for primitive %s" % t.ctor)
            return Primitive(t.ctor, t.args)
        return Defined(t.ctor, t.args)
    ts.error("expected an atom")


def _parse_threshold(ts: _Tokens) -> Threshold:
    if ts.accept("#"):
        if ts.accept("?"):
            return ANY
        return _parse_qual_literal(ts)
    return ANY


def _parse_body(ts: _Tokens) -> tuple[tuple[Atom, Threshold], ...]:
    if ts.at_end():
        return ()
    items = [(_parse_atom(ts), _parse_threshold(ts))]
    while ts.accept(","):
        items.append((_parse_atom(ts), _parse_threshold(ts)))
    return tuple(items)


def _parse_clause(ts: _Tokens, dom: QualDomain, label: str) -> Clause:
    head = _parse_atom(ts)
    if not isinstance(head, Defined):
        ts.error("clause heads must be defined atoms")
    alpha: QualValue = dom.top
    body: tuple[tuple[Atom, Threshold], ...] = ()
    if ts.accept("<-"):
        save = ts.pos
        try:
            cand = _parse_qual_literal(ts)
            if not ts.accept("-"):
                raise ParseError("no closing dash", ts.line)
            alpha = dom.check(cand)
        except (ParseError, qualdom.QualError):
            ts.pos = save
        body = _parse_body(ts)
    ts.accept(".")
    if not ts.at_end():
        ts.error("trailing input after clause")
    if alpha == dom.bottom:
        ts.error("attenuation factor must not be the bottom value")
    return Clause(head, alpha, body, label)


def parse_goal(text: str, dom: QualDomain, line: int = 1) -> Goal:
    ts = _Tokens(_tokenize(text, line), line)
    items: list[GoalItem] = []
    thresholds: dict[str, Threshold] = {}
    while True:
        atom = _parse_atom(ts)
        ts.expect("#")
        qvar = ts.expect("var")
        if qvar in thresholds:
            raise ParseError("duplicate qualification variable %s" % qvar, line)
        thresholds[qvar] = ANY
        items.append(GoalItem(atom, qvar, ANY))
        if not ts.accept(","):
            break
    if ts.accept("|"):
        while True:
            qvar = ts.expect("var")
            if qvar not in thresholds:
                raise ParseError("unknown qualification variable %s" % qvar, line)
            ts.expect(">=")
            beta = dom.check(_parse_qual_literal(ts))
            thresholds[qvar] = beta
            if not ts.accept(","):
                break
    if not ts.at_end():
        ts.error("trailing input after goal")
    term_vars = set()
    for item in items:
        atom = item.atom
        parts = (atom.lhs, atom.rhs) if isinstance(atom, Equation) else atom.args
        for t in parts:
            term_vars.update(_term_vars(t))
    clash = term_vars & set(thresholds)
    if clash:
        raise ParseError(
            "qualification variables also used in terms: %s" % ", ".join(sorted(clash)),
            line,
        )
    return Goal(tuple(GoalItem(i.atom, i.qvar, thresholds[i.qvar]) for i in items))


def _term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        out: set[str] = set()
        for a in t.args:
            out |= _term_vars(a)
        return out
    return set()


def parse_program(text: str, strict: bool = False) -> Program:
    qdom_spec, cdom = "U", "R"
    declared: dict[str, tuple[str, int]] = {}
    prox_lines: list[tuple[int, str, str, str]] = []
    clause_lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#qdom"):
            qdom_spec = line[len("#qdom"):].strip()
        elif line.startswith("#cdom"):
            cdom = line[len("#cdom"):].strip()
            if cdom not in ("R", "H"):
                raise ParseError("constraint domain must be R or H", lineno)
        elif line.startswith("constructor") or line.startswith("predicate"):
            cat, rest = line.split(None, 1)
            m = re.fullmatch(r"([a-z][A-Za-z0-9_]*'*)\s*/\s*(\d+)", rest.strip())
            if not m:
                raise ParseError("bad %s declaration" % cat, lineno)
            name, arity = m.group(1), int(m.group(2))
            _declare(declared, name, "ctor" if cat == "constructor" else "pred",
                     arity, lineno, explicit=True)
        elif line.startswith("~"):
            m = re.fullmatch(
                r"~\s*\(\s*([A-Za-z0-9_'<>=+*-]+)\s*,\s*([A-Za-z0-9_'<>=+*-]+)\s*\)"
                r"\s*=\s*(.+)",
                line,
            )
            if not m:
                raise ParseError("bad proximity entry", lineno)
            prox_lines.append((lineno, m.group(1), m.group(2), m.group(3).strip()))
        else:
            clause_lines.append((lineno, line))
    dom = qualdom.parse_domain(qdom_spec)
    clauses: list[Clause] = []
    for idx, (lineno, line) in enumerate(clause_lines, start=1):
        ts = _Tokens(_tokenize(line, lineno), lineno)
        clause = _parse_clause(ts, dom, "R%d" % idx)
        if cdom == "H" and not classify_clause(dom, clause)["constraint_free"]:
            for atom, _ in clause.body:
                if isinstance(atom, Primitive):
                    raise ParseError(
                        "primitive atom %r needs #cdom R" % (atom,), lineno
                    )
        clauses.append(clause)
    signature = dict(declared)
    for lineno, clause in zip((l for l, _ in clause_lines), clauses):
        _collect_signature(signature, clause, lineno, strict)
    # a symbol appearing only in proximity entries inherits its partner's
    # category and arity
    for lineno, a, b, _ in prox_lines:
        if a in signature and b not in signature:
            _declare(signature, b, *signature[a], lineno)
        elif b in signature and a not in signature:
            _declare(signature, a, *signature[b], lineno)
    try:
        prox = ProximityRelation(
            dom, [(a, b, dom.parse(v)) for _, a, b, v in prox_lines]
        )
    except (qualdom.QualError, ProximityError) as exc:
        raise ParseError(str(exc), prox_lines[0][0] if prox_lines else None)
    violations = validate_admissible(prox, signature)
    if violations:
        raise ParseError("; ".join(violations))
    return Program(dom, cdom, signature, prox, tuple(clauses))


def _declare(sig, name, cat, arity, lineno, explicit=False):
    if name in PRIMITIVE_PREDS or name in ("true", "false", "inf"):
        if explicit:
            raise ParseError("%s is a reserved symbol" % name, lineno)
        return
    old = sig.get(name)
    if old is None:
        sig[name] = (cat, arity)
    elif old != (cat, arity):
        raise ParseError(
            "symbol %s used as %s/%d but declared as %s/%d"
            % (name, cat, arity, old[0], old[1]),
            lineno,
        )


def _collect_signature(sig, clause: Clause, lineno: int, strict: bool):
    def walk_term(t: Term):
        if isinstance(t, App) and t.ctor not in BUILTIN_CONSTRUCTORS:
            if strict and t.ctor not in sig:
                raise ParseError("undeclared constructor %s" % t.ctor, lineno)
            _declare(sig, t.ctor, "ctor", len(t.args), lineno)
        if isinstance(t, App):
            for a in t.args:
                walk_term(a)

    def walk_atom(a: Atom):
        if isinstance(a, Defined):
            if strict and a.pred not in sig:
                raise ParseError("undeclared predicate %s" % a.pred, lineno)
            _declare(sig, a.pred, "pred", len(a.args), lineno)
        parts = (a.lhs, a.rhs) if isinstance(a, Equation) else a.args
        for t in parts:
            walk_term(t)

    walk_atom(clause.head)
    for atom, _ in clause.body:
        walk_atom(atom)


def parse_term(text: str) -> Term:
    ts = _Tokens(_tokenize(text, 1), 1)
    t = _parse_term(ts)
    if not ts.at_end():
        ts.error("trailing input after term")
    return t


def parse_atom(text: str) -> Atom:
    ts = _Tokens(_tokenize(text, 1), 1)
    a = _parse_atom(ts)
    if not ts.at_end():
        ts.error("trailing input after atom")
    return a


def parse_constraints(text: str) -> list[Atom]:
    """A comma-separated list of primitive atoms and equations."""
    text = text.strip()
    if not text:
        return []
    ts = _Tokens(_tokenize(text, 1), 1)
    out = [_parse_atom(ts)]
    while ts.accept(","):
        out.append(_parse_atom(ts))
    if not ts.at_end():
        ts.error("trailing input after constraints")
    for a in out:
        if isinstance(a, Defined):
            raise ParseError("%r is not an atomic constraint" % (a,))
    return out


# ---------------------------------------------------------------------------
# Pretty-printing

def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Basic):
        return format_rational(t.value)
    if t.ctor == "pair" and len(t.args) == 2:
        return "(%s,%s)" % (format_term(t.args[0]), format_term(t.args[1]))
    if t.ctor in ("nil", "cons"):
        items, tail = [], t
        while isinstance(tail, App) and tail.ctor == "cons" and len(tail.args) == 2:
            items.append(tail.args[0])
            tail = tail.args[1]
        if isinstance(tail, App) and tail.ctor == "nil" and not tail.args:
            return "[%s]" % ",".join(format_term(i) for i in items)
        if items:
            return "[%s|%s]" % (
                ",".join(format_term(i) for i in items),
                format_term(tail),
            )
    if not t.args:
        return t.ctor
    return "%s(%s)" % (t.ctor, ",".join(format_term(a) for a in t.args))


def format_atom(a: Atom) -> str:
    if isinstance(a, Equation):
        return "%s == %s" % (format_term(a.lhs), format_term(a.rhs))
    name = a.pred
    if not a.args:
        return name
    return "%s(%s)" % (name, ",".join(format_term(x) for x in a.args))


def format_threshold(dom: QualDomain, w: Threshold) -> str:
    return "?" if w is ANY else dom.format(w)


def format_clause(dom: QualDomain, c: Clause) -> str:
    body = ", ".join(
        format_atom(a) + ("" if w is ANY else "#%s" % dom.format(w))
        for a, w in c.body
    )
    if c.alpha == dom.top and not body:
        return format_atom(c.head)
    if c.alpha == dom.top:
        return "%s <- %s" % (format_atom(c.head), body)
    return "%s <-%s- %s" % (format_atom(c.head), dom.format(c.alpha), body)


def format_goal(dom: QualDomain, g: Goal) -> str:
    items = ", ".join("%s#%s" % (format_atom(i.atom), i.qvar) for i in g.items)
    conds = ", ".join(
        "%s >= %s" % (i.qvar, dom.format(i.threshold))
        for i in g.items
        if i.threshold is not ANY
    )
    return "%s | %s" % (items, conds) if conds else items


def format_program(p: Program) -> str:
    lines = ["#qdom %s" % p.qdom.name, "#cdom %s" % p.cdom]
    for name, (cat, arity) in sorted(p.signature.items()):
        kw = "constructor" if cat == "ctor" else "predicate"
        lines.append("%s %s/%d" % (kw, name, arity))
    for key, v in sorted(p.prox.entries.items(), key=lambda kv: sorted(kv[0])):
        a, b = sorted(key)
        lines.append("~(%s, %s) = %s" % (a, b, p.qdom.format(v)))
    for c in p.clauses:
        lines.append(format_clause(p.qdom, c))
    return "\n".join(lines) + "\n"
