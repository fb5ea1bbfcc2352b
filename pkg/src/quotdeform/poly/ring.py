"""Multivariate polynomial rings over exact fields with fixed monomial orders."""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

from .field import ExactField


class StructuralError(ValueError):
    """Objects from incompatible parents were combined."""


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position
        self.detail = message


class MonomialOrder:
    """lex, grevlex, or a weight matrix refined by grevlex.

    ``key(exps)`` returns an integer tuple; larger tuples are larger monomials.
    """

    def __init__(self, kind: str = "grevlex", weights: Sequence[Sequence[int]] | None = None):
        if kind not in ("lex", "grevlex", "weights"):
            raise ValueError(f"unknown monomial order {kind!r}")
        if kind == "weights":
            if not weights:
                raise ValueError("weight order needs a nonempty integer matrix")
            weights = tuple(tuple(int(w) for w in row) for row in weights)
            if any(w < 0 for row in weights for w in row):
                raise ValueError("weight matrix entries must be nonnegative")
        else:
            weights = None
        self.kind = kind
        self.weights = weights
        self._cache: dict = {}

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and (self.kind, self.weights) == (other.kind, other.weights)

    def __hash__(self):
        return hash((self.kind, self.weights))

    def __repr__(self):
        if self.kind == "weights":
            return f"MonomialOrder('weights', {[list(r) for r in self.weights]})"
        return f"MonomialOrder({self.kind!r})"

    def key(self, e: tuple) -> tuple:
        k = self._cache.get(e)
        if k is None:
            if self.kind == "lex":
                k = e
            else:
                k = (sum(e),) + tuple(-x for x in reversed(e))
                if self.kind == "weights":
                    if len(self.weights[0]) != len(e):
                        raise StructuralError("weight matrix width does not match the number of variables")
                    k = tuple(sum(w * x for w, x in zip(row, e)) for row in self.weights) + k
            self._cache[e] = k
        return k


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


class PolyRing:
    """``field[names]`` with a monomial order; polynomials compare equal only
    inside equal rings."""

    def __init__(self, field: ExactField, names: Sequence[str], order: MonomialOrder = GREVLEX):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise StructuralError(f"repeated variable names in {names}")
        for n in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", n):
                raise ValueError(f"bad variable name {n!r}")
        self.field = field
        self.names = names
        self.order = order
        self.nvars = len(names)
        self._index = {n: i for i, n in enumerate(names)}

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and self.field == other.field
                and self.names == other.names and self.order == other.order)

    def __hash__(self):
        return hash((self.field, self.names, self.order))

    def __repr__(self):
        return f"{self.field.name}[{','.join(self.names)}]"

    @property
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    @property
    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        c = self.field(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def monomial(self, exps: Sequence[int], coeff=1) -> "Polynomial":
        c = self.field(coeff)
        return Polynomial(self, {tuple(exps): c} if c else {})

    @property
    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.var(n) for n in self.names)

    def var(self, name: str) -> "Polynomial":
        i = self._index[name]
        e = [0] * self.nvars
        e[i] = 1
        return self.monomial(e)

    def index(self, name: str) -> int:
        return self._index[name]

    def __call__(self, x) -> "Polynomial":
        if isinstance(x, Polynomial):
            if x.ring != self:
                raise StructuralError(f"{x!r} lives in {x.ring}, not {self}")
            return x
        if isinstance(x, str):
            return self.parse(x)
        return self.constant(x)

    def from_dict(self, d: dict) -> "Polynomial":
        f = self.field
        out = {}
        for e, c in d.items():
            c = f(c)
            if c:
                out[tuple(e)] = c
        return Polynomial(self, out)

    def parse(self, text: str) -> "Polynomial":
        return _Parser(self, text).parse()

    def with_field(self, field: ExactField) -> "PolyRing":
        return PolyRing(field, self.names, self.order)

    def with_order(self, order: MonomialOrder) -> "PolyRing":
        return PolyRing(self.field, self.names, order)


def _clean(p: int, d: dict) -> dict:
    if p:
        return {e: c % p for e, c in d.items() if c % p}
    return {e: c for e, c in d.items() if c}


class Polynomial:
    """Immutable sparse polynomial.  ``terms()`` lists (exponents, coefficient)
    pairs in strictly descending monomial order."""

    __slots__ = ("ring", "_d", "_sorted")

    def __init__(self, ring: PolyRing, d: dict):
        self.ring = ring
        self._d = d
        self._sorted = None

    # construction helpers
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise StructuralError(f"cannot combine polynomials from {self.ring} and {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    @property
    def coeffs(self) -> dict:
        """The exponent -> coefficient mapping (do not mutate)."""
        return self._d

    def terms(self) -> list[tuple[tuple, object]]:
        if self._sorted is None:
            key = self.ring.order.key
            self._sorted = sorted(self._d.items(), key=lambda t: key(t[0]), reverse=True)
        return self._sorted

    def is_zero(self) -> bool:
        return not self._d

    def __bool__(self):
        return bool(self._d)

    def is_constant(self) -> bool:
        return not self._d or (len(self._d) == 1 and not any(next(iter(self._d))))

    def constant_coefficient(self):
        return self._d.get((0,) * self.ring.nvars, self.ring.field.zero)

    @property
    def lm(self) -> tuple:
        return self.terms()[0][0]

    @property
    def lc(self):
        return self.terms()[0][1]

    def total_degree(self) -> int:
        return max((sum(e) for e in self._d), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self._d), default=-1)

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.field.characteristic
        d = dict(self._d)
        for e, c in other._d.items():
            v = d.get(e)
            d[e] = c if v is None else v + c
        return Polynomial(self.ring, _clean(p, d))

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.field.characteristic
        return Polynomial(self.ring, {e: (-c % p if p else -c) for e, c in self._d.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.field.characteristic
        d: dict = {}
        for e1, c1 in self._d.items():
            for e2, c2 in other._d.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = d.get(e)
                d[e] = c1 * c2 if v is None else v + c1 * c2
        return Polynomial(self.ring, _clean(p, d))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "Polynomial":
        c = self.ring.field(c)
        p = self.ring.field.characteristic
        return Polynomial(self.ring, _clean(p, {e: v * c for e, v in self._d.items()}))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self._d == other._d

    def __hash__(self):
        return hash((self.ring, frozenset(self._d.items())))

    def derivative(self, i: int) -> "Polynomial":
        p = self.ring.field.characteristic
        d = {}
        for e, c in self._d.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                d[ne] = c * e[i]
        return Polynomial(self.ring, _clean(p, d))

    def evaluate(self, images: Sequence["Polynomial"], target: PolyRing | None = None) -> "Polynomial":
        """Substitute ``images[i]`` for the i-th variable."""
        if target is None:
            target = images[0].ring if images else self.ring
        result = target.zero
        powers: dict = {}
        for e, c in self._d.items():
            term = target.constant(c) if self.ring.field == target.field else target.constant(Fraction(c))
            for i, k in enumerate(e):
                if k:
                    pk = powers.get((i, k))
                    if pk is None:
                        pk = images[i] ** k
                        powers[(i, k)] = pk
                    term = term * pk
            result = result + term
        return result

    def map_coefficients(self, ring: PolyRing) -> "Polynomial":
        """Same monomials in a ring with the same variables (possibly another field)."""
        if ring.names != self.ring.names:
            raise StructuralError("variable lists differ")
        return ring.from_dict(self._d)

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self._d:
            return "0"
        f = self.ring.field
        names = self.ring.names
        parts = []
        for e, c in self.terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            neg = False
            if f.characteristic == 0 and c < 0:
                neg, c = True, -c
            cs = f.format(c)
            if mono:
                body = mono if cs == "1" else f"{cs}*{mono}"
            else:
                body = cs
            parts.append(("-" if neg else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, ring: PolyRing, text: str):
        self.ring = ring
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise PolynomialSyntaxError(f"unexpected character {text[pos]!r}", pos)
            start = m.start(m.lastindex)
            if m.group(1):
                self.tokens.append(("num", m.group(1), start))
            elif m.group(2):
                self.tokens.append(("id", m.group(2), start))
            else:
                op = m.group(3)
                self.tokens.append(("op", "^" if op == "**" else op, start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise PolynomialSyntaxError("empty expression", 0)
        f = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise PolynomialSyntaxError(f"unexpected token {t[1]!r}", t[2])
        return f

    def expr(self) -> Polynomial:
        f = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            g = self.term()
            f = f + g if op == "+" else f - g
        return f

    def term(self) -> Polynomial:
        f = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op, _, pos = self.take()[1], None, self.peek()[2]
            g = self.unary()
            if op == "*":
                f = f * g
            else:
                if not g.is_constant() or g.is_zero():
                    raise PolynomialSyntaxError("division only by nonzero constants", pos)
                f = f.scale(self.ring.field.inv(g.constant_coefficient()))
        return f

    def unary(self) -> Polynomial:
        t = self.peek()
        if t[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if t[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Polynomial:
        f = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            t = self.take()
            if t[0] != "num":
                raise PolynomialSyntaxError("exponent must be a nonnegative integer", t[2])
            f = f ** int(t[1])
        return f

    def atom(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind == "num":
            return self.ring.constant(int(val))
        if kind == "id":
            if val not in self.ring._index:
                raise PolynomialSyntaxError(f"unknown variable {val!r}", pos)
            return self.ring.var(val)
        if (kind, val) == ("op", "("):
            f = self.expr()
            k, v, p = self.take()
            if (k, v) != ("op", ")"):
                raise PolynomialSyntaxError("expected ')'", p)
            return f
        raise PolynomialSyntaxError(f"unexpected token {val!r}" if val else "unexpected end of input", pos)


def polys(ring: PolyRing, items: Iterable) -> list[Polynomial]:
    return [ring(x) for x in items]
