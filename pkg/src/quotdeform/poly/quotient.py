"""Ideals with reduced Gröbner bases, quotient rings, and ring maps."""
from __future__ import annotations

from itertools import product as _cartesian
from typing import Iterable, Sequence

from .groebner import Basis, LiftEngine, TermOrder, groebner_vectors
from .ring import MonomialOrder, Polynomial, PolyRing, StructuralError, GREVLEX


def poly_to_vec(f: Polynomial, pos: int = 0) -> dict:
    return {(pos, e): c for e, c in f.coeffs.items()}


def vec_to_poly(ring: PolyRing, v: dict) -> Polynomial:
    return Polynomial(ring, {e: c for (_, e), c in v.items()})


class GroebnerIdeal:
    """An ideal of a polynomial ring together with its reduced Gröbner basis."""

    def __init__(self, ring: PolyRing, gens: Iterable[Polynomial] = ()):
        gens = [ring(g) for g in gens]
        self.ring = ring
        self.gens = tuple(g for g in gens if g)
        p = ring.field.characteristic
        order = TermOrder(ring.order)
        vecs = groebner_vectors([poly_to_vec(g) for g in self.gens], order, p,
                                product_criterion=True)
        self.basis = tuple(vec_to_poly(ring, v) for v in vecs)
        self._reducer = Basis(order, p, [poly_to_vec(g) for g in self.basis])

    def __repr__(self):
        return f"GroebnerIdeal({[str(g) for g in self.basis]})"

    def __eq__(self, other):
        return isinstance(other, GroebnerIdeal) and self.ring == other.ring and self.basis == other.basis

    def __hash__(self):
        return hash((self.ring, self.basis))

    def normal_form(self, f: Polynomial) -> Polynomial:
        f = self.ring(f)
        if not self.basis:
            return f
        return vec_to_poly(self.ring, self._reducer.reduce(poly_to_vec(f)))

    def contains(self, f) -> bool:
        return not self.normal_form(f)

    def contains_ideal(self, other: "GroebnerIdeal") -> bool:
        return all(self.contains(g) for g in other.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.basis)

    def lead_monomials(self) -> list[tuple]:
        return [g.lm for g in self.basis]

    def product(self, other: "GroebnerIdeal") -> "GroebnerIdeal":
        return GroebnerIdeal(self.ring, [a * b for a in self.gens for b in other.gens])

    def sum(self, other: "GroebnerIdeal") -> "GroebnerIdeal":
        return GroebnerIdeal(self.ring, self.gens + other.gens)


def groebner_basis(gens: Sequence[Polynomial], order: MonomialOrder | None = None,
                   ring: PolyRing | None = None) -> GroebnerIdeal:
    """Reduced Gröbner basis of the ideal generated by ``gens``.

    With ``order`` given, the generators are moved to the same ring under
    that order.  An empty list needs ``ring``.
    """
    gens = list(gens)
    rings = {g.ring for g in gens}
    if len(rings) > 1:
        raise StructuralError("generators come from different polynomial rings")
    if ring is None:
        if not gens:
            raise StructuralError("empty generator list needs an explicit ring")
        ring = gens[0].ring
    elif rings and rings != {ring}:
        raise StructuralError("generators do not live in the given ring")
    if order is not None and order != ring.order:
        target = ring.with_order(order)
        gens = [target.from_dict(g.coeffs) for g in gens]
        ring = target
    return GroebnerIdeal(ring, gens)


def normal_form(f: Polynomial, ideal: GroebnerIdeal) -> Polynomial:
    if f.ring != ideal.ring:
        raise StructuralError(f"{f} is not in {ideal.ring}")
    return ideal.normal_form(f)


def standard_monomials(ring: PolyRing, lms: Sequence[tuple], limit: int | None = None) -> list[tuple] | None:
    """Monomials outside the monomial ideal spanned by ``lms``, listed in
    descending monomial order, or None when there are infinitely many."""
    n = ring.nvars
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if all(m[j] == 0 for j in range(n) if j != i) and m[i] > 0]
        if not pure:
            if any(not any(m) for m in lms):
                return []
            return None
        bounds.append(min(pure))
    if any(not any(m) for m in lms):
        return []
    out = []
    for e in _cartesian(*(range(b) for b in bounds)):
        if not any(all(a <= b for a, b in zip(m, e)) for m in lms):
            out.append(tuple(e))
            if limit is not None and len(out) > limit:
                raise OverflowError("too many standard monomials")
    key = ring.order.key
    out.sort(key=key, reverse=True)
    return out


class QuotientRing:
    """``P/J`` for a polynomial ring P and an ideal J; elements are kept as
    normal-form polynomials of P."""

    def __init__(self, ambient: PolyRing, ideal: GroebnerIdeal | Iterable = (), name: str | None = None):
        if not isinstance(ideal, GroebnerIdeal):
            ideal = GroebnerIdeal(ambient, [ambient(g) for g in ideal])
        if ideal.ring != ambient:
            raise StructuralError("ideal lives in another ring")
        self.ambient = ambient
        self.ideal = ideal
        self.name = name

    @property
    def field(self):
        return self.ambient.field

    @property
    def nvars(self) -> int:
        return self.ambient.nvars

    def __repr__(self):
        if self.name:
            return self.name
        if self.ideal.is_zero():
            return repr(self.ambient)
        return f"{self.ambient}/({', '.join(str(g) for g in self.ideal.basis)})"

    def __eq__(self, other):
        return isinstance(other, QuotientRing) and self.ambient == other.ambient and self.ideal == other.ideal

    def __hash__(self):
        return hash((self.ambient, self.ideal))

    def __call__(self, x) -> Polynomial:
        if isinstance(x, Polynomial) and x.ring != self.ambient:
            raise StructuralError(f"{x} is not an element of {self}")
        return self.ideal.normal_form(self.ambient(x))

    def reduce(self, f: Polynomial) -> Polynomial:
        return self.ideal.normal_form(f)

    def is_zero(self, f: Polynomial) -> bool:
        return self.ideal.contains(f)

    def var(self, name: str) -> Polynomial:
        return self(self.ambient.var(name))

    @property
    def gens(self):
        return tuple(self(g) for g in self.ambient.gens)

    def same_ambient(self, other: "QuotientRing") -> bool:
        return self.ambient == other.ambient

    def k_basis(self, limit: int | None = 100000) -> list[tuple] | None:
        """Standard monomials of P/J, or None if P/J is infinite-dimensional."""
        return standard_monomials(self.ambient, self.ideal.lead_monomials(), limit)

    def k_dimension(self) -> int | None:
        b = self.k_basis()
        return None if b is None else len(b)

    def contains_ideal_of(self, other: "QuotientRing") -> bool:
        """True when ``other``'s ideal is inside ours (so we are a quotient of other)."""
        return self.same_ambient(other) and self.ideal.contains_ideal(other.ideal)


class RingMap:
    """A k-algebra map ``source -> target`` given by the images of the ambient
    variables of ``source``."""

    def __init__(self, source: QuotientRing, target: QuotientRing, images: Sequence, check: bool = True):
        if source.field != target.field:
            raise StructuralError("ring maps must be over one field")
        images = [target(target.ambient(x)) for x in images]
        if len(images) != source.nvars:
            raise StructuralError(f"{source} has {source.nvars} variables, got {len(images)} images")
        self.source = source
        self.target = target
        self.images = tuple(images)
        if check:
            for g in source.ideal.basis:
                if not target.is_zero(self.apply_ambient(g)):
                    raise StructuralError(f"relation {g} does not map to zero in {target}")

    def apply_ambient(self, f: Polynomial) -> Polynomial:
        return f.evaluate(self.images, self.target.ambient)

    def __call__(self, f) -> Polynomial:
        f = self.source.ambient(f)
        return self.target(self.apply_ambient(f))

    def compose(self, before: "RingMap") -> "RingMap":
        """``self ∘ before``."""
        return RingMap(before.source, self.target, [self(x) for x in before.images], check=False)

    def __repr__(self):
        return f"RingMap({self.source} -> {self.target}: {[str(x) for x in self.images]})"


def inclusion(source: QuotientRing, target: QuotientRing) -> RingMap:
    """Map sending each variable of ``source`` to the same-named variable of ``target``."""
    names = target.ambient.names
    missing = [n for n in source.ambient.names if n not in names]
    if missing:
        raise StructuralError(f"variables {missing} are not in {target}")
    return RingMap(source, target, [target.ambient.var(n) for n in source.ambient.names])


def coproduct_ring(B1: QuotientRing, B2: QuotientRing, order: MonomialOrder = GREVLEX,
                   name: str | None = None) -> tuple[QuotientRing, RingMap, RingMap]:
    """``B1 ⊗_k B2`` on the disjoint union of the variables, with both inclusions."""
    if B1.field != B2.field:
        raise StructuralError("coproduct needs one coefficient field")
    clash = set(B1.ambient.names) & set(B2.ambient.names)
    if clash:
        raise StructuralError(f"variable names {sorted(clash)} occur in both factors; rename them")
    P = PolyRing(B1.field, B1.ambient.names + B2.ambient.names, order)
    n1 = B1.nvars
    gens = [P.from_dict({e + (0,) * B2.nvars: c for e, c in g.coeffs.items()}) for g in B1.ideal.basis]
    gens += [P.from_dict({(0,) * n1 + e: c for e, c in g.coeffs.items()}) for g in B2.ideal.basis]
    B0 = QuotientRing(P, gens, name=name)
    return B0, inclusion(B1, B0), inclusion(B2, B0)


def lift_engine(ring: QuotientRing, cols: Sequence[Sequence[Polynomial]], m: int,
                rels: Sequence[Sequence[Polynomial]] = ()) -> LiftEngine:
    """LiftEngine over P for columns in R^m, modulo ``rels`` and J·R^m."""
    P = ring.ambient
    rel_vecs = [_col_vec(r) for r in rels]
    for j in range(m):
        for g in ring.ideal.basis:
            rel_vecs.append(poly_to_vec(g, j))
    return LiftEngine([_col_vec(c) for c in cols], rel_vecs, m, P.nvars, P.order, P.field.characteristic)


def _col_vec(col: Sequence[Polynomial]) -> dict:
    v = {}
    for j, f in enumerate(col):
        v.update(poly_to_vec(f, j))
    return v


def vec_to_col(ring: PolyRing, v: dict, m: int) -> list[Polynomial]:
    parts: list[dict] = [{} for _ in range(m)]
    for (pos, e), c in v.items():
        parts[pos][e] = c
    return [Polynomial(ring, d) for d in parts]


def syzygies(cols: Sequence[Sequence[Polynomial]], ring: QuotientRing | None = None) -> list[list[Polynomial]]:
    """Generators of ``{a : sum a_i col_i = 0}`` for columns of R^m."""
    cols = [list(c) for c in cols]
    if not cols:
        return []
    if ring is None:
        ambient = next((f.ring for c in cols for f in c), None)
        if ambient is None:
            raise StructuralError("cannot infer the ring of empty columns")
        ring = QuotientRing(ambient)
    m = len(cols[0])
    if any(len(c) != m for c in cols):
        raise StructuralError("columns have different lengths")
    eng = lift_engine(ring, cols, m)
    out = []
    for v in eng.syzygies():
        col = [ring.reduce(f) for f in vec_to_col(ring.ambient, v, len(cols))]
        if any(col):
            out.append(col)
    return out
