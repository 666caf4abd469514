"""Qualification domains: lattices with an attenuation operation.

Values are plain Python data: bool for the two-point domain, Fraction for
certainty/cost payloads, the INF sentinel for infinite cost, and 2-tuples
for product values.  Domains are immutable descriptor objects exposing the
lattice operations plus the constraint encodings used by goal solving.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Optional, Union

from .constraints import Conj, Constraint, Exists, conj
from .terms import App, Basic, Equation, Primitive, Term, Var


class QualError(Exception):
    pass


class _Inf:
    _instance: Optional["_Inf"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"


INF = _Inf()


class _Any:
    _instance: Optional["_Any"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "?"


ANY = _Any()

QualValue = Union[bool, Fraction, _Inf, tuple]
Threshold = Union[_Any, QualValue]

_gensym_counter = itertools.count(1)


def _fresh() -> str:
    return "_Q%d" % next(_gensym_counter)


def _as_term(x: Union[str, Term]) -> Term:
    return Var(x) if isinstance(x, str) else x


class QualDomain:
    """Base for all qualification domains."""

    name: str
    bottom: QualValue
    top: QualValue
    stable: bool  # attenuation of non-bottom values never reaches bottom

    def contains(self, v: QualValue) -> bool:
        raise NotImplementedError

    def check(self, v: QualValue) -> QualValue:
        if not self.contains(v):
            raise QualError("%r is not a value of domain %s" % (v, self.name))
        return v

    def leq(self, d: QualValue, e: QualValue) -> bool:
        raise NotImplementedError

    def glb(self, d: QualValue, e: QualValue) -> QualValue:
        raise NotImplementedError

    def lub(self, d: QualValue, e: QualValue) -> QualValue:
        raise NotImplementedError

    def attenuate(self, d: QualValue, e: QualValue) -> QualValue:
        raise NotImplementedError

    def infimum(self, vs) -> QualValue:
        out = self.top
        for v in vs:
            out = self.glb(out, v)
        return out

    def supremum(self, vs) -> QualValue:
        out = self.bottom
        for v in vs:
            out = self.lub(out, v)
        return out

    def threshold_ok(self, e: QualValue, w: Threshold) -> bool:
        if w is ANY:
            return True
        return self.leq(self.check(w), self.check(e))

    def is_stable(self, samples=()) -> bool:
        for d, e in samples:
            if d != self.bottom and e != self.bottom:
                if self.attenuate(d, e) == self.bottom:
                    return False
        return self.stable

    # -- embedding into the constraint domain -------------------------------

    def iota(self, v: QualValue) -> Term:
        """Constraint-domain term denoting a non-bottom value."""
        raise QualError("domain %s has no constraint embedding" % self.name)

    def encode_qval(self, x: Union[str, Term]) -> Constraint:
        """Constraint satisfied exactly by the embedded carrier values."""
        raise QualError("domain %s has no constraint embedding" % self.name)

    def encode_qbound(self, x, y, z) -> Constraint:
        """Constraint encoding x below the attenuation of y by z."""
        raise QualError("domain %s has no constraint embedding" % self.name)

    def decode(self, t: Term) -> QualValue:
        """Inverse of iota on ground terms."""
        raise QualError("domain %s has no constraint embedding" % self.name)

    # -- text ---------------------------------------------------------------

    def parse(self, s: str) -> QualValue:
        raise NotImplementedError

    def format(self, v: QualValue) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.name

    def __eq__(self, other) -> bool:
        return isinstance(other, QualDomain) and self.name == other.name

    def __hash__(self) -> int:
        return hash(self.name)


def _format_fraction(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return "%s/%s" % (q.numerator, q.denominator)


def _parse_fraction(s: str) -> Fraction:
    return Fraction(s)  # accepts "3/5", "0.8", "2"


class BoolDomain(QualDomain):
    name = "B"
    bottom = False
    top = True
    stable = True

    def contains(self, v):
        return isinstance(v, bool)

    def leq(self, d, e):
        self.check(d), self.check(e)
        return (not d) or e

    def glb(self, d, e):
        self.check(d), self.check(e)
        return d and e

    def lub(self, d, e):
        self.check(d), self.check(e)
        return d or e

    def attenuate(self, d, e):
        self.check(d), self.check(e)
        return d and e

    def iota(self, v):
        if self.check(v) is False:
            raise QualError("the bottom value has no embedding")
        return Basic(Fraction(1))

    def encode_qval(self, x):
        return Equation(_as_term(x), Basic(Fraction(1)))

    def encode_qbound(self, x, y, z):
        # with qval in force all three stand for the top value
        return Conj(())

    def decode(self, t):
        if isinstance(t, Basic) and t.value == 1:
            return True
        raise QualError("cannot decode %r in %s" % (t, self.name))

    def parse(self, s):
        if s == "true":
            return True
        if s == "false":
            return False
        raise QualError("bad boolean qualification value %r" % s)

    def format(self, v):
        return "true" if self.check(v) else "false"


class UnitDomain(QualDomain):
    """Certainty values in [0,1]; attenuation by product or by min."""

    bottom = Fraction(0)
    top = Fraction(1)
    stable = True

    def __init__(self, use_min: bool):
        self.use_min = use_min
        self.name = "U'" if use_min else "U"

    def contains(self, v):
        return isinstance(v, Fraction) and 0 <= v <= 1

    def leq(self, d, e):
        return self.check(d) <= self.check(e)

    def glb(self, d, e):
        return min(self.check(d), self.check(e))

    def lub(self, d, e):
        return max(self.check(d), self.check(e))

    def attenuate(self, d, e):
        self.check(d), self.check(e)
        return min(d, e) if self.use_min else d * e

    def iota(self, v):
        if self.check(v) == 0:
            raise QualError("the bottom value has no embedding")
        return Basic(v)

    def encode_qval(self, x):
        t = _as_term(x)
        return conj(
            [
                Primitive("cp_<", (Basic(Fraction(0)), t)),
                Primitive("cp_<=", (t, Basic(Fraction(1)))),
            ]
        )

    def encode_qbound(self, x, y, z):
        x, y, z = _as_term(x), _as_term(y), _as_term(z)
        if self.use_min:
            return conj([Primitive("cp_<=", (x, y)), Primitive("cp_<=", (x, z))])
        aux = _fresh()
        return Exists(
            aux,
            conj(
                [
                    Primitive("op_*", (y, z, Var(aux))),
                    Primitive("cp_<=", (x, Var(aux))),
                ]
            ),
        )

    def decode(self, t):
        if isinstance(t, Basic) and 0 <= t.value <= 1:
            return t.value
        raise QualError("cannot decode %r in %s" % (t, self.name))

    def parse(self, s):
        v = _parse_fraction(s)
        return self.check(v)

    def format(self, v):
        return _format_fraction(self.check(v))


class WeightDomain(QualDomain):
    """Cost values in [0, inf]; the ordering is the reversed numeric order
    (smaller cost is better), attenuation by addition or by max."""

    bottom = INF
    top = Fraction(0)
    stable = True

    def __init__(self, use_max: bool, integral: bool):
        self.use_max = use_max
        self.integral = integral
        self.name = ("W'" if use_max else "W") + ("d" if integral else "")

    def contains(self, v):
        if v is INF:
            return True
        if not (isinstance(v, Fraction) and v >= 0):
            return False
        return v.denominator == 1 if self.integral else True

    def leq(self, d, e):
        self.check(d), self.check(e)
        if d is INF:
            return True
        if e is INF:
            return False
        return d >= e

    def glb(self, d, e):
        self.check(d), self.check(e)
        if d is INF or e is INF:
            return INF
        return max(d, e)

    def lub(self, d, e):
        self.check(d), self.check(e)
        if d is INF:
            return e
        if e is INF:
            return d
        return min(d, e)

    def attenuate(self, d, e):
        self.check(d), self.check(e)
        if d is INF or e is INF:
            return INF
        return max(d, e) if self.use_max else d + e

    def iota(self, v):
        if self.check(v) is INF:
            raise QualError("the bottom value has no embedding")
        return Basic(v)

    def encode_qval(self, x):
        # integrality of the d-variants is a side condition checked on
        # decoded values, not expressible in the linear engine
        return Primitive("cp_>=", (_as_term(x), Basic(Fraction(0))))

    def encode_qbound(self, x, y, z):
        x, y, z = _as_term(x), _as_term(y), _as_term(z)
        if self.use_max:
            return conj([Primitive("cp_>=", (x, y)), Primitive("cp_>=", (x, z))])
        aux = _fresh()
        return Exists(
            aux,
            conj(
                [
                    Primitive("op_+", (y, z, Var(aux))),
                    Primitive("cp_>=", (x, Var(aux))),
                ]
            ),
        )

    def decode(self, t):
        if isinstance(t, Basic) and t.value >= 0:
            if self.integral and t.value.denominator != 1:
                raise QualError("non-integral cost %r in %s" % (t, self.name))
            return t.value
        raise QualError("cannot decode %r in %s" % (t, self.name))

    def parse(self, s):
        if s == "inf":
            return INF
        return self.check(_parse_fraction(s))

    def format(self, v):
        if self.check(v) is INF:
            return "inf"
        return _format_fraction(v)


class ProductDomain(QualDomain):
    """Cartesian or strict product of two domains.  In the strict variant a
    pair with a bottom component collapses to the bottom pair, which keeps
    the product of stable domains stable."""

    def __init__(self, left: QualDomain, right: QualDomain, strict: bool):
        self.left = left
        self.right = right
        self.strict = strict
        sep = "x" if strict else "*"
        self.name = "%s%s%s" % (_pname(left), sep, _pname(right))
        self.bottom = (left.bottom, right.bottom)
        self.top = (left.top, right.top)
        self.stable = strict and left.stable and right.stable

    def pair(self, d1: QualValue, d2: QualValue) -> QualValue:
        self.left.check(d1), self.right.check(d2)
        if self.strict and (d1 == self.left.bottom or d2 == self.right.bottom):
            return self.bottom
        return (d1, d2)

    def contains(self, v):
        if not (isinstance(v, tuple) and len(v) == 2):
            return False
        if not (self.left.contains(v[0]) and self.right.contains(v[1])):
            return False
        if self.strict and v != self.bottom:
            return v[0] != self.left.bottom and v[1] != self.right.bottom
        return True

    def leq(self, d, e):
        self.check(d), self.check(e)
        return self.left.leq(d[0], e[0]) and self.right.leq(d[1], e[1])

    def glb(self, d, e):
        self.check(d), self.check(e)
        return self.pair(self.left.glb(d[0], e[0]), self.right.glb(d[1], e[1]))

    def lub(self, d, e):
        self.check(d), self.check(e)
        return self.pair(self.left.lub(d[0], e[0]), self.right.lub(d[1], e[1]))

    def attenuate(self, d, e):
        self.check(d), self.check(e)
        return self.pair(
            self.left.attenuate(d[0], e[0]), self.right.attenuate(d[1], e[1])
        )

    def iota(self, v):
        if self.check(v) == self.bottom:
            raise QualError("the bottom value has no embedding")
        return App("pair", (self.left.iota(v[0]), self.right.iota(v[1])))

    def _decompose(self, x: Term, body) -> Constraint:
        a, b = _fresh(), _fresh()
        eq = Equation(x, App("pair", (Var(a), Var(b))))
        return Exists(a, Exists(b, conj([eq] + body(Var(a), Var(b)))))

    def encode_qval(self, x):
        if not self.strict:
            raise QualError(
                "the non-strict product %s has no constraint embedding" % self.name
            )
        return self._decompose(
            _as_term(x),
            lambda a, b: [self.left.encode_qval(a), self.right.encode_qval(b)],
        )

    def encode_qbound(self, x, y, z):
        if not self.strict:
            raise QualError(
                "the non-strict product %s has no constraint embedding" % self.name
            )
        x, y, z = _as_term(x), _as_term(y), _as_term(z)
        return self._decompose(
            x,
            lambda x1, x2: [
                self._decompose(
                    y,
                    lambda y1, y2: [
                        self._decompose(
                            z,
                            lambda z1, z2: [
                                self.left.encode_qbound(x1, y1, z1),
                                self.right.encode_qbound(x2, y2, z2),
                            ],
                        )
                    ],
                )
            ],
        )

    def decode(self, t):
        if isinstance(t, App) and t.ctor == "pair" and len(t.args) == 2:
            return self.pair(self.left.decode(t.args[0]), self.right.decode(t.args[1]))
        raise QualError("cannot decode %r in %s" % (t, self.name))

    def parse(self, s):
        s = s.strip()
        if not (s.startswith("(") and s.endswith(")")):
            raise QualError("bad product value %r" % s)
        inner = s[1:-1]
        depth = 0
        for i, ch in enumerate(inner):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                return self.pair(
                    self.left.parse(inner[:i]), self.right.parse(inner[i + 1:])
                )
        raise QualError("bad product value %r" % s)

    def format(self, v):
        self.check(v)
        return "(%s,%s)" % (self.left.format(v[0]), self.right.format(v[1]))


def _pname(d: QualDomain) -> str:
    return "(%s)" % d.name if isinstance(d, ProductDomain) else d.name


# ---------------------------------------------------------------------------
# Registry and directive parsing

B = BoolDomain()
U = UnitDomain(use_min=False)
Uprime = UnitDomain(use_min=True)
W = WeightDomain(use_max=False, integral=False)
Wprime = WeightDomain(use_max=True, integral=False)
Wd = WeightDomain(use_max=False, integral=True)
Wdprime = WeightDomain(use_max=True, integral=True)

_BASIC = {d.name: d for d in (B, U, Uprime, W, Wprime, Wd, Wdprime)}


def make_product(d1: QualDomain, d2: QualDomain, strict: bool) -> ProductDomain:
    return ProductDomain(d1, d2, strict)


def parse_domain(spec: str) -> QualDomain:
    """Parse a domain directive such as "U", "W'", "UxW" (strict product)
    or "U*W" (plain cartesian product); products may nest with parens."""
    d, rest = _parse_dom(spec.strip())
    if rest:
        raise QualError("trailing input in domain spec %r" % spec)
    return d


def _parse_dom(s: str):
    left, rest = _parse_dom_atom(s)
    rest = rest.lstrip()
    while rest and rest[0] in "x*":
        strict = rest[0] == "x"
        right, rest = _parse_dom_atom(rest[1:].lstrip())
        left = make_product(left, right, strict)
        rest = rest.lstrip()
    return left, rest


def _parse_dom_atom(s: str):
    if s.startswith("("):
        d, rest = _parse_dom(s[1:])
        rest = rest.lstrip()
        if not rest.startswith(")"):
            raise QualError("unbalanced parentheses in domain spec")
        return d, rest[1:]
    for name in sorted(_BASIC, key=len, reverse=True):
        if s.startswith(name):
            return _BASIC[name], s[len(name):]
    raise QualError("unknown qualification domain in %r" % s)


def check_axioms(dom: QualDomain, triples) -> None:
    """Assert the lattice and attenuation laws on sample triples."""
    bot, top = dom.bottom, dom.top
    for d, e1, e2 in triples:
        for v in (d, e1, e2):
            assert dom.leq(bot, v) and dom.leq(v, top)
        # glb/lub laws
        assert dom.glb(d, d) == d and dom.lub(d, d) == d
        assert dom.glb(d, e1) == dom.glb(e1, d)
        assert dom.lub(d, e1) == dom.lub(e1, d)
        assert dom.glb(dom.glb(d, e1), e2) == dom.glb(d, dom.glb(e1, e2))
        assert dom.lub(dom.lub(d, e1), e2) == dom.lub(d, dom.lub(e1, e2))
        assert dom.lub(d, dom.glb(d, e1)) == d
        assert dom.glb(d, dom.lub(d, e1)) == d
        # attenuation axioms
        assert dom.attenuate(d, dom.attenuate(e1, e2)) == dom.attenuate(
            dom.attenuate(d, e1), e2
        )
        assert dom.attenuate(d, e1) == dom.attenuate(e1, d)
        assert dom.attenuate(d, top) == d
        assert dom.attenuate(d, bot) == bot
        assert dom.leq(dom.attenuate(d, e1), e1)
        assert dom.attenuate(d, dom.glb(e1, e2)) == dom.glb(
            dom.attenuate(d, e1), dom.attenuate(d, e2)
        )
        # monotonicity
        if dom.leq(e1, e2):
            assert dom.leq(dom.attenuate(d, e1), dom.attenuate(d, e2))
