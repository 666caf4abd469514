"""Constraint stores over the Herbrand and linear-real domains.

A store holds a finite set of atomic constraints (primitive atoms and
equations) and normalizes them at construction time into:

  * congruence classes over all subterm occurrences (union-find), and
  * a linear system over the numeric variables.

Entailment is decided on that normal form: equations via congruence plus
derived linear equalities, inequalities via Fourier-Motzkin with strict
bookkeeping.  Everything outside the decidable fragment (nonlinear
multiplication) yields Unknown, never a wrong boolean.
"""
from __future__ import annotations

import enum
import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

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
    is_ground,
    min_var,
    variables,
)


class Tristate(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


TRUE = Tristate.TRUE
FALSE = Tristate.FALSE
UNKNOWN = Tristate.UNKNOWN


def tri_all(values) -> Tristate:
    out = TRUE
    for v in values:
        if v is FALSE:
            return FALSE
        if v is UNKNOWN:
            out = UNKNOWN
    return out


def tri_not(v: Tristate) -> Tristate:
    if v is TRUE:
        return FALSE
    if v is FALSE:
        return TRUE
    return UNKNOWN


class ConstraintError(Exception):
    pass


# ---------------------------------------------------------------------------
# Compound constraints

@dataclass(frozen=True)
class Conj:
    parts: tuple["Constraint", ...]

    def __repr__(self) -> str:
        return " & ".join(repr(p) for p in self.parts)


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Constraint"

    def __repr__(self) -> str:
        return "exists %s (%r)" % (self.var, self.body)


Constraint = Union[Primitive, Equation, Conj, Exists]


def conj(parts) -> Constraint:
    parts = tuple(parts)
    if len(parts) == 1:
        return parts[0]
    return Conj(parts)


def atomic_parts(pi: Constraint):
    """Flatten a quantifier-free conjunction into its atomic constraints."""
    if isinstance(pi, Conj):
        for p in pi.parts:
            yield from atomic_parts(p)
    else:
        yield pi


# ---------------------------------------------------------------------------
# Ground evaluation of primitive atoms

_ARITH = {
    "op_+": lambda a, b: a + b,
    "op_-": lambda a, b: a - b,
    "op_*": lambda a, b: a * b,
}
_COMPARE = {
    "cp_<": lambda a, b: a < b,
    "cp_<=": lambda a, b: a <= b,
    "cp_>": lambda a, b: a > b,
    "cp_>=": lambda a, b: a >= b,
}


def eval_primitive(atom: Primitive) -> bool:
    """Truth of a ground primitive atom; false if any argument has a
    data constructor."""
    if not is_ground(atom):
        raise ConstraintError("eval_primitive needs a ground atom: %r" % (atom,))
    vals = []
    for arg in atom.args:
        if not isinstance(arg, Basic):
            return False
        vals.append(arg.value)
    if atom.pred in _ARITH:
        if len(vals) != 3:
            raise ConstraintError("bad arity for %s" % atom.pred)
        return _ARITH[atom.pred](vals[0], vals[1]) == vals[2]
    if atom.pred in _COMPARE:
        if len(vals) != 2:
            raise ConstraintError("bad arity for %s" % atom.pred)
        return _COMPARE[atom.pred](vals[0], vals[1])
    raise ConstraintError("unknown primitive predicate %r" % atom.pred)


# ---------------------------------------------------------------------------
# Linear algebra over exact rationals

LinExpr = dict[str, Fraction]  # variable -> coefficient


@dataclass(frozen=True)
class Ineq:
    """coeffs . x + const  (<|<=)  0"""

    coeffs: tuple[tuple[str, Fraction], ...]
    const: Fraction
    strict: bool

    @staticmethod
    def of(coeffs: LinExpr, const: Fraction, strict: bool) -> "Ineq":
        items = tuple(sorted((v, c) for v, c in coeffs.items() if c != 0))
        return Ineq(items, const, strict)

    def expr(self) -> LinExpr:
        return dict(self.coeffs)


def _subst_expr(coeffs: LinExpr, const: Fraction, solved) -> tuple[LinExpr, Fraction]:
    out: LinExpr = {}
    c = const
    for v, k in coeffs.items():
        if v in solved:
            scoef, sconst = solved[v]
            for v2, k2 in scoef.items():
                out[v2] = out.get(v2, Fraction(0)) + k * k2
            c += k * sconst
        else:
            out[v] = out.get(v, Fraction(0)) + k
    return {v: k for v, k in out.items() if k != 0}, c


def gauss_solve(eq_rows):
    """Solve a list of (coeffs, const) equality rows (coeffs.x + const == 0).

    Returns (solved, ok) where solved maps a pivot variable to its affine
    normal form (coeffs over free variables, const); ok is False when the
    system is inconsistent.
    """
    solved: dict[str, tuple[LinExpr, Fraction]] = {}
    for coeffs, const in eq_rows:
        coeffs, const = _subst_expr(coeffs, const, solved)
        if not coeffs:
            if const != 0:
                return solved, False
            continue
        pivot = sorted(coeffs)[0]
        k = coeffs[pivot]
        expr = {v: -c / k for v, c in coeffs.items() if v != pivot}
        cst = -const / k
        # re-normalize earlier pivots
        for p, (pc, pk) in list(solved.items()):
            if pivot in pc:
                factor = pc.pop(pivot)
                for v, c2 in expr.items():
                    pc[v] = pc.get(v, Fraction(0)) + factor * c2
                pk += factor * cst
                solved[p] = ({v: c2 for v, c2 in pc.items() if c2 != 0}, pk)
        solved[pivot] = (expr, cst)
    return solved, True


def fm_satisfiable(ineqs) -> tuple[bool, Optional[dict[str, Fraction]]]:
    """Fourier-Motzkin over rationals with strict-bound bookkeeping.

    Returns (satisfiable, witness).  The witness assigns every variable
    occurring in `ineqs`.
    """
    rows = [Ineq.of(r.expr(), r.const, r.strict) for r in ineqs]
    all_vars = sorted({v for r in rows for v, _ in r.coeffs})
    steps = []  # (var, lowers, uppers) each as (coeffs, const, strict) of bound expr
    for x in all_vars:
        lowers, uppers, rest = [], [], []
        for r in rows:
            e = r.expr()
            k = e.pop(x, Fraction(0))
            if k == 0:
                rest.append(r)
            elif k > 0:
                # x <= -(e.x + const)/k
                uppers.append(({v: -c / k for v, c in e.items()}, -r.const / k, r.strict))
            else:
                lowers.append(({v: -c / k for v, c in e.items()}, -r.const / k, r.strict))
        for (lc, lk, ls), (uc, uk, us) in itertools.product(lowers, uppers):
            coeffs = dict(lc)
            for v, c in uc.items():
                coeffs[v] = coeffs.get(v, Fraction(0)) - c
            rest.append(Ineq.of(coeffs, lk - uk, ls or us))
        steps.append((x, lowers, uppers))
        rows = rest
    for r in rows:
        if r.coeffs:
            raise AssertionError("elimination left a variable")
        if r.strict:
            if not r.const < 0:
                return False, None
        else:
            if not r.const <= 0:
                return False, None
    witness: dict[str, Fraction] = {}

    def ev(coeffs: LinExpr, const: Fraction) -> Fraction:
        return sum((c * witness[v] for v, c in coeffs.items()), const)

    for x, lowers, uppers in reversed(steps):
        lo = None  # (value, strict)
        for lc, lk, ls in lowers:
            v = ev(lc, lk)
            if lo is None or v > lo[0] or (v == lo[0] and ls):
                lo = (v, ls)
        hi = None
        for uc, uk, us in uppers:
            v = ev(uc, uk)
            if hi is None or v < hi[0] or (v == hi[0] and us):
                hi = (v, us)
        if lo is None and hi is None:
            witness[x] = Fraction(0)
        elif lo is None:
            witness[x] = hi[0] - (1 if hi[1] else 0)
        elif hi is None:
            witness[x] = lo[0] + (1 if lo[1] else 0)
        else:
            if lo[0] == hi[0]:
                witness[x] = lo[0]
            else:
                witness[x] = (lo[0] + hi[0]) / 2
    return True, witness


# ---------------------------------------------------------------------------
# Congruence closure over subterm occurrences

class _Nodes:
    """Union-find over interned term nodes with congruence propagation."""

    def __init__(self):
        self.parent: list[int] = []
        self.kind: list[tuple] = []  # ('var', name) | ('basic', Fraction) | ('app', ctor, (ids...))
        self.intern_map: dict[tuple, int] = {}
        self.unsat = False

    def _new(self, kind: tuple) -> int:
        nid = len(self.parent)
        self.parent.append(nid)
        self.kind.append(kind)
        return nid

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def intern(self, t: Term) -> int:
        if isinstance(t, Var):
            key = ("var", t.name)
        elif isinstance(t, Basic):
            key = ("basic", t.value)
        else:
            key = ("app", t.ctor, tuple(self.intern(a) for a in t.args))
        if key in self.intern_map:
            return self.intern_map[key]
        nid = self._new(key)
        self.intern_map[key] = nid
        return nid

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def classes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return out

    def propagate(self) -> None:
        """Upward congruence, decomposition and clash detection to fixpoint."""
        changed = True
        while changed and not self.unsat:
            changed = False
            # upward congruence: same signature -> same class
            sigs: dict[tuple, int] = {}
            for i, k in enumerate(self.kind):
                if k[0] != "app":
                    continue
                sig = (k[1], tuple(self.find(c) for c in k[2]))
                if sig in sigs:
                    if self.find(sigs[sig]) != self.find(i):
                        self.union(sigs[sig], i)
                        changed = True
                else:
                    sigs[sig] = i
            # decomposition and clashes within classes
            for members in self.classes().values():
                rigid = [self.kind[m] for m in members if self.kind[m][0] != "var"]
                for k1, k2 in itertools.combinations(rigid, 2):
                    if k1[0] == "basic" and k2[0] == "basic":
                        if k1[1] != k2[1]:
                            self.unsat = True
                            return
                    elif k1[0] == "app" and k2[0] == "app":
                        if k1[1] != k2[1] or len(k1[2]) != len(k2[2]):
                            self.unsat = True
                            return
                        for c1, c2 in zip(k1[2], k2[2]):
                            if self.find(c1) != self.find(c2):
                                self.union(c1, c2)
                                changed = True
                    else:
                        self.unsat = True
                        return
        if not self.unsat:
            self._occurs_check()

    def _occurs_check(self) -> None:
        # finite-tree semantics: a class reachable from itself through
        # constructor arguments has no solution
        children: dict[int, set[int]] = {}
        for i, k in enumerate(self.kind):
            if k[0] == "app":
                children.setdefault(self.find(i), set()).update(
                    self.find(c) for c in k[2]
                )
        WHITE, GRAY, BLACK = 0, 1, 2
        color: dict[int, int] = {}

        def visit(c: int) -> bool:
            color[c] = GRAY
            for nxt in children.get(c, ()):
                st = color.get(nxt, WHITE)
                if st == GRAY:
                    return False
                if st == WHITE and not visit(nxt):
                    return False
            color[c] = BLACK
            return True

        for c in list(children):
            if color.get(c, WHITE) == WHITE and not visit(c):
                self.unsat = True
                return


# ---------------------------------------------------------------------------
# The store

class ConstraintStore:
    """A normalized, read-only store of atomic constraints.

    `herbrand=True` leaves the primitive signature empty (equality-only
    stores); primitive atoms are then rejected.
    """

    def __init__(self, atoms=(), herbrand: bool = False):
        flat: list[Atom] = []
        for a in atoms:
            for part in atomic_parts(a):
                if isinstance(part, Exists):
                    raise ConstraintError("stores hold atomic constraints only")
                flat.append(part)
        self.atoms: tuple[Atom, ...] = tuple(dict.fromkeys(flat))
        self.herbrand = herbrand
        self._lock = threading.RLock()
        self._nodes = _Nodes()
        self._numeric: set[int] = set()      # class roots known to be numeric
        self._nonlinear: list[Primitive] = []
        self._solved: dict[str, tuple[LinExpr, Fraction]] = {}
        self._ineqs: list[Ineq] = []
        self._status = TRUE
        self._witness: Optional[dict[str, Fraction]] = None
        self._normalize()

    # -- construction -------------------------------------------------------

    def _normalize(self) -> None:
        nodes = self._nodes
        for atom in self.atoms:
            if isinstance(atom, Equation):
                nodes.union(nodes.intern(atom.lhs), nodes.intern(atom.rhs))
            elif isinstance(atom, Primitive):
                if self.herbrand:
                    raise ConstraintError(
                        "primitive atom %r in a Herbrand store" % (atom,)
                    )
                if atom.pred not in _ARITH and atom.pred not in _COMPARE:
                    raise ConstraintError("unknown primitive predicate %r" % atom.pred)
                for arg in atom.args:
                    if isinstance(arg, App):
                        # primitive atoms are false on constructor arguments
                        self._status = FALSE
                        return
                    self._numeric.add(nodes.find(nodes.intern(arg)))
            elif isinstance(atom, Defined):
                raise ConstraintError("defined atom %r is not a constraint" % (atom,))
            else:
                raise ConstraintError("bad constraint %r" % (atom,))
        nodes.propagate()
        if nodes.unsat:
            self._status = FALSE
            return
        self._numeric = {nodes.find(r) for r in self._numeric}
        # iterate congruence <-> linear until stable
        for _ in range(len(self.atoms) + 3):
            if not self._linear_pass():
                self._status = FALSE
                return
            if not self._merge_derived():
                break
        if self._status is FALSE:
            return
        ok, witness = fm_satisfiable(self._substituted_ineqs())
        if not ok:
            self._status = FALSE
            return
        self._witness = witness
        if self._nonlinear:
            self._status = UNKNOWN

    def _num_rep(self, nid: int) -> Optional[str]:
        """Canonical numeric name of a class: a rational rendered as its
        repr-string constant is handled separately; variables get the least
        member name."""
        root = self._nodes.find(nid)
        names = [
            k[1]
            for m, k in enumerate(self._nodes.kind)
            if self._nodes.find(m) == root and k[0] == "var"
        ]
        if names:
            return min_var(names)
        return None

    def _num_const(self, nid: int) -> Optional[Fraction]:
        root = self._nodes.find(nid)
        for m, k in enumerate(self._nodes.kind):
            if self._nodes.find(m) == root and k[0] == "basic":
                return k[1]
        return None

    def _term_expr(self, t: Term) -> Optional[tuple[LinExpr, Fraction]]:
        """Affine form of a numeric var/basic term, through the class and
        the solved equalities; None when t is not numeric."""
        if isinstance(t, App):
            return None
        nid = self._nodes.intern(t)
        const = self._num_const(nid)
        if const is not None:
            return {}, const
        rep = self._num_rep(nid)
        if rep is None:
            return None
        return _subst_expr({rep: Fraction(1)}, Fraction(0), self._solved)

    def _linear_pass(self) -> bool:
        """Rebuild the linear system from the atoms; returns False on
        inconsistency."""
        nodes = self._nodes
        eq_rows: list[tuple[LinExpr, Fraction]] = []
        ineqs: list[Ineq] = []
        nonlinear: list[Primitive] = []

        def arg_form(t: Term) -> tuple[LinExpr, Fraction]:
            nid = nodes.intern(t)
            c = self._num_const(nid)
            if c is not None:
                return {}, c
            rep = self._num_rep(nid)
            if rep is None:
                raise ConstraintError("non-numeric term in primitive atom")
            return {rep: Fraction(1)}, Fraction(0)

        # numeric-class equalities derived from congruence classes
        for members in nodes.classes().values():
            forms = []
            for m in members:
                k = nodes.kind[m]
                if k[0] == "basic":
                    forms.append(({}, k[1]))
            rep = self._num_rep(nodes.find(members[0]))
            if rep is not None and forms:
                for coeffs, const in forms[:1]:
                    eq_rows.append(({rep: Fraction(1)}, -const))
        for atom in self.atoms:
            if not isinstance(atom, Primitive):
                continue
            if atom.pred in _COMPARE:
                (ca, ka), (cb, kb) = arg_form(atom.args[0]), arg_form(atom.args[1])
                coeffs = dict(ca)
                for v, c in cb.items():
                    coeffs[v] = coeffs.get(v, Fraction(0)) - c
                const = ka - kb
                if atom.pred in ("cp_>", "cp_>="):
                    coeffs = {v: -c for v, c in coeffs.items()}
                    const = -const
                ineqs.append(Ineq.of(coeffs, const, atom.pred in ("cp_<", "cp_>")))
            else:
                a, b, c = atom.args
                fa, fb, fc = arg_form(a), arg_form(b), arg_form(c)
                if atom.pred == "op_+":
                    parts = [(fa, Fraction(1)), (fb, Fraction(1)), (fc, Fraction(-1))]
                elif atom.pred == "op_-":
                    parts = [(fa, Fraction(1)), (fb, Fraction(-1)), (fc, Fraction(-1))]
                else:
                    # op_* is linear when a factor is pinned to a constant
                    # (directly or through the equalities solved so far)
                    pa = _subst_expr(*fa, self._solved)
                    pb = _subst_expr(*fb, self._solved)
                    if not pa[0]:
                        parts = [(fb, pa[1]), (fc, Fraction(-1))]
                    elif not pb[0]:
                        parts = [(fa, pb[1]), (fc, Fraction(-1))]
                    else:
                        nonlinear.append(atom)
                        continue
                eq_rows.append(_lin_combine([(cs, k, mult) for (cs, k), mult in parts]))
        solved, ok = gauss_solve(eq_rows)
        if not ok:
            return False
        self._solved = solved
        self._ineqs = ineqs
        self._nonlinear = nonlinear
        return True

    def _merge_derived(self) -> bool:
        """Merge classes whose numeric normal forms coincide; returns True
        when something changed."""
        nodes = self._nodes
        groups: dict[tuple, int] = {}
        changed = False
        for members in list(nodes.classes().values()):
            root = nodes.find(members[0])
            # only classes touched by primitive atoms or holding rationals
            # participate in the linear system
            if root not in self._numeric and self._num_const(root) is None:
                continue
            rep = self._num_rep(root)
            const = self._num_const(root)
            if const is not None:
                key = ((), const)
            elif rep is not None:
                coeffs, k = _subst_expr({rep: Fraction(1)}, Fraction(0), self._solved)
                key = (tuple(sorted(coeffs.items())), k)
            else:
                continue
            if key in groups:
                if nodes.find(groups[key]) != root:
                    nodes.union(groups[key], root)
                    changed = True
            else:
                groups[key] = root
            # a pinned variable class joins the class of its constant
            if const is None and rep is not None and key[0] == ():
                cid = nodes.intern(Basic(key[1]))
                if nodes.find(cid) != nodes.find(root):
                    nodes.union(cid, root)
                    changed = True
        if changed:
            nodes.propagate()
            if nodes.unsat:
                self._status = FALSE
        # refresh numeric roots after merging
        self._numeric = {nodes.find(r) for r in self._numeric}
        return changed

    def _substituted_ineqs(self) -> list[Ineq]:
        out = []
        for r in self._ineqs:
            coeffs, const = _subst_expr(r.expr(), r.const, self._solved)
            out.append(Ineq.of(coeffs, const, r.strict))
        return out

    # -- queries ------------------------------------------------------------

    def satisfiable(self) -> Tristate:
        return self._status

    def witness_valuation(self) -> Optional["Valuation"]:
        """A numeric witness for the linear variables (None if Unsat).
        Variables eliminated into solved forms are recovered by evaluating
        their affine expressions; unconstrained ones default to zero."""
        if self._witness is None:
            return None
        with self._lock:
            eta = dict(self._witness)
            names = {
                v for a in self.atoms if isinstance(a, Primitive)
                for v in variables(a)
            }
            pending = sorted(names - set(eta))
            for _ in range(len(pending) + 1):
                progress = False
                for name in list(pending):
                    expr = self._term_expr(Var(name))
                    if expr is None:
                        eta[name] = Fraction(0)
                    else:
                        coeffs, const = expr
                        free = set(coeffs) - set(eta)
                        if free == {name} and coeffs.get(name) == 1 and not const:
                            eta[name] = Fraction(0)
                        elif free:
                            continue
                        else:
                            eta[name] = const + sum(
                                c * eta[v] for v, c in coeffs.items()
                            )
                    pending.remove(name)
                    progress = True
                if not pending or not progress:
                    break
            for name in pending:
                eta[name] = Fraction(0)
            return {k: Basic(v) for k, v in eta.items()}

    def _is_numeric_class(self, nid: int) -> bool:
        root = self._nodes.find(nid)
        return root in self._numeric or self._num_const(root) is not None

    def pi_equiv(self, t: Term, s: Term) -> Tristate:
        """t == s entailed by the store."""
        if self._status is FALSE:
            return TRUE
        with self._lock:
            return self._pi_equiv(t, s)

    def _pi_equiv(self, t: Term, s: Term) -> Tristate:
        nodes = self._nodes
        ti, si = nodes.intern(t), nodes.intern(s)
        nodes.propagate()
        if nodes.unsat:  # cannot happen from pure interning
            return UNKNOWN
        if nodes.find(ti) == nodes.find(si):
            return TRUE
        et, es = self._term_expr(t), self._term_expr(s)
        if et is not None and es is not None:
            # forced equal iff neither strict side is satisfiable
            diff: LinExpr = dict(et[0])
            for v, c in es[0].items():
                diff[v] = diff.get(v, Fraction(0)) - c
            const = et[1] - es[1]
            base = self._substituted_ineqs()
            lt = fm_satisfiable(base + [Ineq.of(diff, const, True)])[0]
            gt = fm_satisfiable(
                base + [Ineq.of({v: -c for v, c in diff.items()}, -const, True)]
            )[0]
            if not lt and not gt:
                return TRUE
            if self._nonlinear:
                return UNKNOWN
            return FALSE
        # structural: expand variables to a rigid class member when possible
        t2, s2 = self._expand(t), self._expand(s)
        if isinstance(t2, Var) or isinstance(s2, Var):
            # distinct classes of free/Herbrand variables admit countermodels
            if self._nonlinear:
                return UNKNOWN
            return FALSE
        if isinstance(t2, Basic) or isinstance(s2, Basic):
            if t2 == s2:
                return TRUE
            if isinstance(t2, Basic) and isinstance(s2, Basic):
                return FALSE
            et, es = self._term_expr(t2), self._term_expr(s2)
            if et is not None and es is not None:
                return self._pi_equiv(t2, s2)
            return FALSE
        if t2.ctor != s2.ctor or len(t2.args) != len(s2.args):
            return FALSE
        return tri_all(self._pi_equiv(a, b) for a, b in zip(t2.args, s2.args))

    def _expand(self, t: Term) -> Term:
        """Replace a variable by a rigid member of its class, if any."""
        if not isinstance(t, Var):
            return t
        w = self.class_witness(t)
        return w if w is not None else t

    def class_witness(self, t: Var, _seen: Optional[set[int]] = None) -> Optional[Term]:
        """A non-variable term the store proves equal to t, or None."""
        with self._lock:
            nid = self._nodes.intern(t)
            self._nodes.propagate()
            return self._reconstruct_rigid(nid, _seen or set())

    def _reconstruct_rigid(self, nid: int, seen: set[int]) -> Optional[Term]:
        nodes = self._nodes
        root = nodes.find(nid)
        if root in seen:
            raise ConstraintError("cyclic congruence class")
        const = self._num_const(root)
        if const is not None:
            return Basic(const)
        e = self._term_expr_root(root)
        if e is not None and not e[0]:
            return Basic(e[1])
        for m, k in enumerate(nodes.kind):
            if nodes.find(m) == root and k[0] == "app":
                args = []
                for cid in k[2]:
                    sub = self._reconstruct_rigid(cid, seen | {root})
                    if sub is None:
                        sub = Var(self._canonical_name(cid))
                    args.append(sub)
                return App(k[1], tuple(args))
        return None

    def _term_expr_root(self, root: int):
        rep = self._num_rep(root)
        if rep is None or root not in self._numeric:
            return None
        return _subst_expr({rep: Fraction(1)}, Fraction(0), self._solved)

    def _canonical_name(self, nid: int) -> str:
        nodes = self._nodes
        root = nodes.find(nid)
        names = [
            k[1]
            for m, k in enumerate(nodes.kind)
            if nodes.find(m) == root and k[0] == "var"
        ]
        if not names:
            raise ConstraintError("class has no variable member")
        return min_var(names)

    def canonical_var(self, name: str) -> str:
        with self._lock:
            nid = self._nodes.intern(Var(name))
            self._nodes.propagate()
            return self._canonical_name(nid)

    def canonical_form(self, t: Term) -> Term:
        """Replace every variable by the least-ordered member of its class."""
        if isinstance(t, Var):
            return Var(self.canonical_var(t.name))
        if isinstance(t, Basic):
            return t
        return App(t.ctor, tuple(self.canonical_form(a) for a in t.args))

    # -- entailment ---------------------------------------------------------

    def entails(self, pi: Constraint) -> Tristate:
        if self._status is FALSE:
            return TRUE
        if isinstance(pi, Equation):
            return self.pi_equiv(pi.lhs, pi.rhs)
        if isinstance(pi, Primitive):
            return self._entails_primitive(pi)
        if isinstance(pi, Conj):
            return tri_all(self.entails(p) for p in pi.parts)
        if isinstance(pi, Exists):
            return self._entails_exists(pi)
        raise ConstraintError("bad constraint %r" % (pi,))

    def entails_all(self, pis) -> Tristate:
        return tri_all(self.entails(p) for p in pis)

    def _entails_primitive(self, atom: Primitive) -> Tristate:
        if atom.pred not in _ARITH and atom.pred not in _COMPARE:
            raise ConstraintError("unknown primitive predicate %r" % atom.pred)
        forms = []
        with self._lock:
            for arg in atom.args:
                if isinstance(arg, App):
                    return FALSE  # false on constructor arguments
                if isinstance(arg, Var) and not self._is_numeric_class(
                    self._nodes.intern(arg)
                ):
                    return FALSE if not self._nonlinear else UNKNOWN
                e = self._term_expr(arg)
                if e is None:
                    # a variable the store does not force to be numeric: a
                    # constructor-valued countermodel falsifies the atom
                    return FALSE if not self._nonlinear else UNKNOWN
                forms.append(e)
            base = self._substituted_ineqs()
        if atom.pred in _COMPARE:
            (ca, ka), (cb, kb) = forms
            diff = dict(ca)
            for v, c in cb.items():
                diff[v] = diff.get(v, Fraction(0)) - c
            const = ka - kb
            if atom.pred in ("cp_>", "cp_>="):
                diff = {v: -c for v, c in diff.items()}
                const = -const
            strict = atom.pred in ("cp_<", "cp_>")
            # negate: coeffs.x + const (<|<=) 0  ->  -(coeffs.x + const) (<=|<) 0
            neg = Ineq.of({v: -c for v, c in diff.items()}, -const, not strict)
            sat, _ = fm_satisfiable(base + [neg])
            if not sat:
                return TRUE
            return FALSE if not self._nonlinear else UNKNOWN
        # op_+/op_-/op_*: entailed as the corresponding equality
        (ca, ka), (cb, kb), (cc, kc) = forms
        if atom.pred == "op_+":
            diff, const = _lin_combine([(ca, ka, 1), (cb, kb, 1), (cc, kc, -1)])
        elif atom.pred == "op_-":
            diff, const = _lin_combine([(ca, ka, 1), (cb, kb, -1), (cc, kc, -1)])
        else:
            if not ca:
                diff, const = _lin_combine([(cb, kb, ka), (cc, kc, -1)])
            elif not cb:
                diff, const = _lin_combine([(ca, ka, kb), (cc, kc, -1)])
            else:
                return UNKNOWN
        lt = fm_satisfiable(base + [Ineq.of(diff, const, True)])[0]
        gt = fm_satisfiable(
            base + [Ineq.of({v: -c for v, c in diff.items()}, -const, True)]
        )[0]
        if not lt and not gt:
            return TRUE
        return FALSE if not self._nonlinear else UNKNOWN

    def _entails_exists(self, pi: Exists) -> Tristate:
        # witness construction: try class representatives and simple constants
        candidates: list[Term] = []
        with self._lock:
            for members in self._nodes.classes().values():
                root = self._nodes.find(members[0])
                w = self._reconstruct_rigid(root, set())
                if w is not None:
                    candidates.append(w)
                else:
                    try:
                        candidates.append(Var(self._canonical_name(root)))
                    except ConstraintError:
                        pass
        candidates.extend([Basic(Fraction(0)), Basic(Fraction(1))])
        for cand in candidates:
            if self.entails(subst_constraint(pi.body, {pi.var: cand})) is TRUE:
                return TRUE
        return UNKNOWN

    # -- substitution -------------------------------------------------------

    def subst(self, sigma: Subst) -> "ConstraintStore":
        return ConstraintStore(
            [apply_subst(a, sigma) for a in self.atoms], herbrand=self.herbrand
        )

    def union(self, other: "ConstraintStore") -> "ConstraintStore":
        return ConstraintStore(
            self.atoms + other.atoms, herbrand=self.herbrand and other.herbrand
        )

    def with_atoms(self, extra) -> "ConstraintStore":
        return ConstraintStore(self.atoms + tuple(extra), herbrand=self.herbrand)

    def __repr__(self) -> str:
        return "ConstraintStore({%s})" % ", ".join(repr(a) for a in self.atoms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ConstraintStore)
            and set(self.atoms) == set(other.atoms)
        )

    def __hash__(self) -> int:
        return hash(frozenset(self.atoms))


def _lin_combine(parts) -> tuple[LinExpr, Fraction]:
    coeffs: LinExpr = {}
    const = Fraction(0)
    for cs, k, mult in parts:
        for v, c in cs.items():
            coeffs[v] = coeffs.get(v, Fraction(0)) + mult * c
        const += mult * k
    return coeffs, const


def subst_constraint(pi: Constraint, sigma: Subst) -> Constraint:
    if isinstance(pi, (Primitive, Equation)):
        return apply_subst(pi, sigma)
    if isinstance(pi, Conj):
        return Conj(tuple(subst_constraint(p, sigma) for p in pi.parts))
    if isinstance(pi, Exists):
        inner = {k: v for k, v in sigma.items() if k != pi.var}
        return Exists(pi.var, subst_constraint(pi.body, inner))
    raise ConstraintError("bad constraint %r" % (pi,))


# ---------------------------------------------------------------------------
# Solutions of constraints under a valuation

Valuation = dict[str, Term]  # every bound term must be ground


def satisfies(eta: Valuation, pi: Constraint) -> bool:
    """Membership of the valuation in the solution set of the constraint."""
    for t in eta.values():
        if not is_ground(t):
            raise ConstraintError("valuations must be ground")
    return _satisfies(eta, pi)


def _satisfies(eta: Valuation, pi: Constraint) -> bool:
    if isinstance(pi, Primitive):
        grounded = apply_subst(pi, eta)
        if not is_ground(grounded):
            raise ConstraintError("non-ground residual in %r" % (grounded,))
        return eval_primitive(grounded)
    if isinstance(pi, Equation):
        lhs, rhs = apply_subst(pi.lhs, eta), apply_subst(pi.rhs, eta)
        if not (is_ground(lhs) and is_ground(rhs)):
            raise ConstraintError("non-ground residual in %r == %r" % (lhs, rhs))
        return lhs == rhs
    if isinstance(pi, Conj):
        return all(_satisfies(eta, p) for p in pi.parts)
    if isinstance(pi, Exists):
        return _satisfies_exists(eta, pi)
    raise ConstraintError("bad constraint %r" % (pi,))


def satisfies_store(eta: Valuation, store: ConstraintStore) -> bool:
    return all(_satisfies(eta, a) for a in store.atoms)


def _satisfies_exists(eta: Valuation, pi: Exists) -> bool:
    bound = {pi.var}
    body = pi.body
    while isinstance(body, Exists):
        bound.add(body.var)
        body = body.body
    atoms = list(atomic_parts(body))
    eta = dict(eta)
    # propagate determined values for the bound variables
    progress = True
    while progress and bound - set(eta):
        progress = False
        for atom in atoms:
            if isinstance(atom, Equation):
                progress |= _bind_by_matching(eta, bound, atom.lhs, atom.rhs)
            elif isinstance(atom, Primitive) and atom.pred in _ARITH:
                progress |= _bind_by_arith(eta, bound, atom)
    if bound - set(eta):
        raise ConstraintError(
            "cannot determine existential witnesses for %r" % (pi,)
        )
    return all(_satisfies(eta, a) for a in atoms)


def _bind_by_matching(eta: Valuation, bound: set[str], lhs: Term, rhs: Term) -> bool:
    lhs = apply_subst(lhs, eta)
    rhs = apply_subst(rhs, eta)
    if is_ground(rhs):
        lhs, rhs = rhs, lhs
    if not is_ground(lhs):
        return False
    changed = False
    stack = [(rhs, lhs)]
    while stack:
        pat, val = stack.pop()
        if isinstance(pat, Var):
            if pat.name in bound and pat.name not in eta:
                eta[pat.name] = val
                changed = True
        elif isinstance(pat, App) and isinstance(val, App):
            if pat.ctor == val.ctor and len(pat.args) == len(val.args):
                stack.extend(zip(pat.args, val.args))
    return changed


def _bind_by_arith(eta: Valuation, bound: set[str], atom: Primitive) -> bool:
    args = [apply_subst(a, eta) for a in atom.args]
    vals = [a.value if isinstance(a, Basic) else None for a in args]
    unknown = [i for i, v in enumerate(vals) if v is None]
    if len(unknown) != 1:
        return False
    i = unknown[0]
    target = args[i]
    if not (isinstance(target, Var) and target.name in bound):
        return False
    a, b, c = vals
    if atom.pred == "op_+":
        val = {0: lambda: c - b, 1: lambda: c - a, 2: lambda: a + b}[i]()
    elif atom.pred == "op_-":
        val = {0: lambda: c + b, 1: lambda: a - c, 2: lambda: a - b}[i]()
    else:  # op_*
        if i == 2:
            val = a * b
        elif i == 0:
            if b == 0:
                return False
            val = c / b
        else:
            if a == 0:
                return False
            val = c / a
    eta[target.name] = Basic(val)
    return True
