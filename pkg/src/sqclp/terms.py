"""Terms, atoms, positions and substitutions.

Terms are immutable trees: variables, exact-rational basic values, and
constructor applications.  Substitutions are plain dicts mapping variable
names to terms.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union


class TermError(Exception):
    pass


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Basic:
    value: Fraction

    def __repr__(self) -> str:
        return format_rational(self.value)


@dataclass(frozen=True)
class App:
    ctor: str
    args: tuple["Term", ...] = ()

    def __repr__(self) -> str:
        if not self.args:
            return self.ctor
        return "%s(%s)" % (self.ctor, ", ".join(repr(a) for a in self.args))


Term = Union[Var, Basic, App]

# Constructors every signature provides.
BUILTIN_CONSTRUCTORS = {
    "true": 0,
    "false": 0,
    "pair": 2,
    "nil": 0,
    "cons": 2,
}


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return "%d/%d" % (q.numerator, q.denominator)


def mk_pair(a: Term, b: Term) -> App:
    return App("pair", (a, b))


def mk_list(items) -> Term:
    out: Term = App("nil")
    for item in reversed(list(items)):
        out = App("cons", (item, out))
    return out


# ---------------------------------------------------------------------------
# Atoms

@dataclass(frozen=True)
class Defined:
    pred: str
    args: tuple[Term, ...] = ()

    def __repr__(self) -> str:
        if not self.args:
            return self.pred
        return "%s(%s)" % (self.pred, ", ".join(repr(a) for a in self.args))


@dataclass(frozen=True)
class Primitive:
    pred: str
    args: tuple[Term, ...] = ()

    def __repr__(self) -> str:
        return "%s(%s)" % (self.pred, ", ".join(repr(a) for a in self.args))


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __repr__(self) -> str:
        return "%r == %r" % (self.lhs, self.rhs)


Atom = Union[Defined, Primitive, Equation]

# The fixed primitive signature of the real constraint domain.  The Herbrand
# domain uses the empty primitive signature.
PRIMITIVE_PREDS = {
    "op_+": 3,
    "op_*": 3,
    "op_-": 3,
    "cp_<": 2,
    "cp_<=": 2,
    "cp_>": 2,
    "cp_>=": 2,
}


# ---------------------------------------------------------------------------
# Positions

Position = tuple[int, ...]

ROOT: Position = ()


def positions(t: Term) -> set[Position]:
    out: set[Position] = {ROOT}
    if isinstance(t, App):
        for i, arg in enumerate(t.args, start=1):
            out.update((i,) + q for q in positions(arg))
    return out


def symbol_at(t: Term, p: Position):
    """Symbol of t at position p: a variable name, a rational, or a ctor."""
    sub = subterm(t, p)
    if isinstance(sub, Var):
        return sub.name
    if isinstance(sub, Basic):
        return sub.value
    return sub.ctor


def subterm(t: Term, p: Position) -> Term:
    for i in p:
        if not isinstance(t, App) or not (1 <= i <= len(t.args)):
            raise TermError("invalid position %r" % (p,))
        t = t.args[i - 1]
    return t


def replace(t: Term, p: Position, s: Term) -> Term:
    if not p:
        return s
    if not isinstance(t, App) or not (1 <= p[0] <= len(t.args)):
        raise TermError("invalid position %r" % (p,))
    i = p[0]
    args = list(t.args)
    args[i - 1] = replace(args[i - 1], p[1:], s)
    return App(t.ctor, tuple(args))


def size(t: Term) -> int:
    if isinstance(t, App):
        return 1 + sum(size(a) for a in t.args)
    return 1


def variables(obj) -> set[str]:
    out: set[str] = set()
    _collect_vars(obj, out)
    return out


def _collect_vars(obj, out: set[str]) -> None:
    if isinstance(obj, Var):
        out.add(obj.name)
    elif isinstance(obj, App):
        for a in obj.args:
            _collect_vars(a, out)
    elif isinstance(obj, (Defined, Primitive)):
        for a in obj.args:
            _collect_vars(a, out)
    elif isinstance(obj, Equation):
        _collect_vars(obj.lhs, out)
        _collect_vars(obj.rhs, out)
    elif isinstance(obj, (list, tuple, set, frozenset)):
        for x in obj:
            _collect_vars(x, out)


def is_ground(obj) -> bool:
    return not variables(obj)


# ---------------------------------------------------------------------------
# Substitutions

Subst = dict[str, Term]


def apply_subst(obj, sigma: Subst):
    if isinstance(obj, Var):
        return sigma.get(obj.name, obj)
    if isinstance(obj, Basic):
        return obj
    if isinstance(obj, App):
        return App(obj.ctor, tuple(apply_subst(a, sigma) for a in obj.args))
    if isinstance(obj, Defined):
        return Defined(obj.pred, tuple(apply_subst(a, sigma) for a in obj.args))
    if isinstance(obj, Primitive):
        return Primitive(obj.pred, tuple(apply_subst(a, sigma) for a in obj.args))
    if isinstance(obj, Equation):
        return Equation(apply_subst(obj.lhs, sigma), apply_subst(obj.rhs, sigma))
    raise TermError("cannot apply substitution to %r" % (obj,))


def compose(sigma: Subst, sigma2: Subst) -> Subst:
    """Composition such that obj(compose(s, s2)) == (obj s) s2."""
    out: Subst = {}
    for x, t in sigma.items():
        t2 = apply_subst(t, sigma2)
        if not (isinstance(t2, Var) and t2.name == x):
            out[x] = t2
    for x, t in sigma2.items():
        if x not in sigma and not (isinstance(t, Var) and t.name == x):
            out[x] = t
    return out


def match(pattern: Term, target: Term, binding: Subst | None = None) -> Subst | None:
    """One-way syntactic matching: find sigma with pattern*sigma == target."""
    binding = dict(binding) if binding else {}
    if _match(pattern, target, binding):
        return binding
    return None


def _match(pattern: Term, target: Term, binding: Subst) -> bool:
    if isinstance(pattern, Var):
        prev = binding.get(pattern.name)
        if prev is None:
            binding[pattern.name] = target
            return True
        return prev == target
    if isinstance(pattern, Basic):
        return pattern == target
    return (
        isinstance(target, App)
        and target.ctor == pattern.ctor
        and len(target.args) == len(pattern.args)
        and all(_match(p, t, binding) for p, t in zip(pattern.args, target.args))
    )


def match_atom(pattern: Atom, target: Atom) -> Subst | None:
    if isinstance(pattern, Defined) and isinstance(target, Defined):
        if pattern.pred != target.pred or len(pattern.args) != len(target.args):
            return None
        binding: Subst = {}
        for p, t in zip(pattern.args, target.args):
            if not _match(p, t, binding):
                return None
        return binding
    if isinstance(pattern, Primitive) and isinstance(target, Primitive):
        if pattern.pred != target.pred or len(pattern.args) != len(target.args):
            return None
        binding = {}
        for p, t in zip(pattern.args, target.args):
            if not _match(p, t, binding):
                return None
        return binding
    if isinstance(pattern, Equation) and isinstance(target, Equation):
        binding = {}
        if _match(pattern.lhs, target.lhs, binding) and _match(
            pattern.rhs, target.rhs, binding
        ):
            return binding
        return None
    return None


# ---------------------------------------------------------------------------
# Term extension (the << operation) and the variable order

def extend(t: Term, s: Term) -> Term:
    if isinstance(t, Var):
        return s
    if isinstance(t, Basic):
        return t
    if isinstance(s, App) and len(s.args) == len(t.args):
        return App(t.ctor, tuple(extend(ti, si) for ti, si in zip(t.args, s.args)))
    return t


def var_ord(name: str) -> tuple[str]:
    """Deterministic total order key on variable names (lexicographic)."""
    return (name,)


def min_var(names) -> str:
    return min(names, key=var_ord)


def rename_apart(obj, taken: set[str], suffix_base: str = "_r"):
    """Rename the variables of obj so they avoid `taken`; returns (obj', sigma)."""
    sigma: Subst = {}
    counter = 0
    for name in sorted(variables(obj)):
        if name in taken:
            new = name
            while new in taken or new in sigma:
                counter += 1
                new = "%s%s%d" % (name, suffix_base, counter)
            sigma[name] = Var(new)
            taken.add(new)
    if not sigma:
        return obj, sigma
    return apply_subst(obj, sigma), sigma
