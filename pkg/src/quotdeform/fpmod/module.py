"""Finitely presented modules over quotients of one polynomial ring.

Every module over ``P/J`` is stored as a P-module: ``P^g`` modulo its own
relation rows plus ``J·e_j``.  Modules whose rings share the ambient P can be
combined freely; maps are P-linear, which for quotient rings of P is the same
as linear over either ring.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from ..poly.groebner import Basis, LiftEngine, TermOrder, groebner_vectors
from ..poly.quotient import (GroebnerIdeal, QuotientRing, lift_engine, poly_to_vec, standard_monomials,
                             vec_to_col)
from ..poly.ring import Polynomial, PolyRing, StructuralError


class NotWellDefined(ValueError):
    pass


class NotFiniteDimensional(ValueError):
    pass


def _col_vec(col: Sequence[Polynomial]) -> dict:
    v = {}
    for j, f in enumerate(col):
        for e, c in f.coeffs.items():
            v[(j, e)] = c
    return v


class FPModule:
    """``ring^ngens / (rows of rels)``.  Each relation is a length-``ngens``
    sequence of ambient polynomials."""

    def __init__(self, ring: QuotientRing, ngens: int, rels: Iterable[Sequence] = (), name: str | None = None):
        P = ring.ambient
        rows = []
        for r in rels:
            r = [ring(P(x)) for x in r]
            if len(r) != ngens:
                raise StructuralError(f"relation of length {len(r)} for a module on {ngens} generators")
            if any(r):
                rows.append(tuple(r))
        self.ring = ring
        self.ngens = ngens
        self.rels = tuple(rows)
        self.name = name
        self._gb: Basis | None = None
        self._gbvecs: list | None = None

    # presentation data
    @property
    def ambient(self) -> PolyRing:
        return self.ring.ambient

    @property
    def field(self):
        return self.ring.field

    def relation_vectors(self) -> list[dict]:
        """All P-level relations: the rows plus the ring ideal times each generator."""
        out = [_col_vec(r) for r in self.rels]
        for j in range(self.ngens):
            for g in self.ring.ideal.basis:
                out.append(poly_to_vec(g, j))
        return out

    def _ensure_gb(self):
        if self._gb is None:
            order = TermOrder(self.ambient.order)
            p = self.field.characteristic
            self._gbvecs = groebner_vectors(self.relation_vectors(), order, p,
                                            product_criterion=(self.ngens <= 1))
            self._gb = Basis(order, p, self._gbvecs)
        return self._gb

    def gb_vectors(self) -> list[dict]:
        self._ensure_gb()
        return self._gbvecs

    def __repr__(self):
        if self.name:
            return self.name
        return f"FPModule({self.ring}, {self.ngens} gens, {len(self.rels)} rels)"

    # elements
    def reduce(self, coeffs: Sequence) -> tuple:
        if len(coeffs) != self.ngens:
            raise StructuralError(f"expected {self.ngens} coefficients, got {len(coeffs)}")
        P = self.ambient
        coeffs = [P(c) for c in coeffs]
        if not self.ngens:
            return ()
        r = self._ensure_gb().reduce(_col_vec(coeffs))
        return tuple(vec_to_col(P, r, self.ngens))

    def is_zero_coeffs(self, coeffs: Sequence) -> bool:
        return not any(self.reduce(coeffs))

    def element(self, coeffs: Sequence) -> "ModuleElement":
        return ModuleElement(self, self.reduce(coeffs))

    def zero(self) -> "ModuleElement":
        return ModuleElement(self, tuple(self.ambient.zero for _ in range(self.ngens)))

    def gen(self, i: int) -> "ModuleElement":
        c = [self.ambient.zero] * self.ngens
        c[i] = self.ambient.one
        return self.element(c)

    def gens(self) -> list["ModuleElement"]:
        return [self.gen(i) for i in range(self.ngens)]

    def is_zero(self) -> bool:
        P = self.ambient
        return all(self.is_zero_coeffs([P.one if j == i else P.zero for j in range(self.ngens)])
                   for i in range(self.ngens))

    def annihilated_by(self, ideal_gens: Iterable[Polynomial]) -> bool:
        for g in ideal_gens:
            for j in range(self.ngens):
                c = [self.ambient.zero] * self.ngens
                c[j] = g
                if not self.is_zero_coeffs(c):
                    return False
        return True

    def over(self, ring: QuotientRing) -> "FPModule":
        """The same P-module regarded over another quotient ring of P."""
        if ring == self.ring:
            return self
        if ring.ambient != self.ambient:
            raise StructuralError("rings have different ambient polynomial rings")
        if not self.annihilated_by(ring.ideal.basis):
            raise StructuralError(f"{self} is not annihilated by the ideal of {ring}")
        rels = list(self.rels)
        for g in self.ring.ideal.basis:
            if not ring.ideal.contains(g):
                for j in range(self.ngens):
                    row = [self.ambient.zero] * self.ngens
                    row[j] = g
                    rels.append(row)
        return FPModule(ring, self.ngens, rels, self.name)

    # k-vector space layer
    def k_basis(self) -> list[tuple[int, tuple]] | None:
        """Standard terms (position, exponents) of the relation module, or None
        if the module is infinite-dimensional over k.  This is the finiteness
        witness: every position needs a pure power of each variable among the
        leading terms."""
        if not hasattr(self, "_kbasis"):
            gb = self.gb_vectors() if self.ngens else []
            order = TermOrder(self.ambient.order)
            by_pos: dict[int, list] = {j: [] for j in range(self.ngens)}
            for v in gb:
                pos, e = order.lead(v)
                by_pos[pos].append(e)
            out = []
            for j in range(self.ngens):
                sm = standard_monomials(self.ambient, by_pos[j], limit=200000)
                if sm is None:
                    out = None
                    break
                out.extend((j, e) for e in sm)
            self._kbasis = out
        return self._kbasis

    def k_dimension(self) -> int:
        b = self.k_basis()
        if b is None:
            raise NotFiniteDimensional(f"{self} is not finite-dimensional over {self.field.name}")
        return len(b)

    def is_finite(self) -> bool:
        return self.k_basis() is not None

    def coords(self, coeffs: Sequence) -> list:
        """Coordinates over k in the standard-term basis."""
        basis = self.k_basis()
        if basis is None:
            raise NotFiniteDimensional(f"{self} is not finite-dimensional")
        if not hasattr(self, "_kindex"):
            self._kindex = {t: i for i, t in enumerate(basis)}
        out = [self.field.zero] * len(basis)
        r = self.reduce(coeffs)
        for j, f in enumerate(r):
            for e, c in f.coeffs.items():
                out[self._kindex[(j, e)]] = c
        return out

    def from_coords(self, vec: Sequence) -> tuple:
        basis = self.k_basis()
        P = self.ambient
        parts: list[dict] = [{} for _ in range(self.ngens)]
        for (j, e), c in zip(basis, vec):
            if c:
                parts[j][e] = self.field(c)
        return tuple(Polynomial(P, d) for d in parts)

    def basis_elements(self) -> list[tuple]:
        basis = self.k_basis()
        if basis is None:
            raise NotFiniteDimensional(f"{self} is not finite-dimensional")
        P = self.ambient
        out = []
        for j, e in basis:
            c = [P.zero] * self.ngens
            c[j] = P.monomial(e)
            out.append(tuple(c))
        return out

    def format_element(self, coeffs: Sequence) -> str:
        return "[" + ", ".join(str(c) for c in self.reduce(coeffs)) + "]"


class ModuleElement:
    __slots__ = ("module", "coeffs")

    def __init__(self, module: FPModule, coeffs: tuple):
        self.module = module
        self.coeffs = coeffs

    def _other(self, other) -> tuple:
        if isinstance(other, ModuleElement):
            if other.module is not self.module and other.module.ngens != self.module.ngens:
                raise StructuralError("elements of different modules")
            return other.coeffs
        return tuple(other)

    def __add__(self, other):
        o = self._other(other)
        return self.module.element([a + b for a, b in zip(self.coeffs, o)])

    def __sub__(self, other):
        o = self._other(other)
        return self.module.element([a - b for a, b in zip(self.coeffs, o)])

    def __neg__(self):
        return self.module.element([-a for a in self.coeffs])

    def __rmul__(self, r):
        r = self.module.ambient(r)
        return self.module.element([r * a for a in self.coeffs])

    def __eq__(self, other):
        if isinstance(other, ModuleElement):
            return self.module.is_zero_coeffs([a - b for a, b in zip(self.coeffs, other.coeffs)])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __repr__(self):
        return "[" + ", ".join(str(c) for c in self.coeffs) + "]"


def present(ring: QuotientRing, ngens: int, rels: Iterable[Sequence] = (), name: str | None = None) -> FPModule:
    return FPModule(ring, ngens, rels, name)


def free_module(ring: QuotientRing, rank: int, name: str | None = None) -> FPModule:
    return FPModule(ring, rank, (), name)


class ModuleHom:
    """A P-linear map given by the images of the source generators
    (``matrix[j]`` is the target coefficient vector of the image of e_j)."""

    def __init__(self, source: FPModule, target: FPModule, matrix: Sequence[Sequence], check: bool = True):
        if source.ambient != target.ambient:
            raise StructuralError("source and target are over different polynomial rings")
        if len(matrix) != source.ngens:
            raise StructuralError(f"need {source.ngens} image vectors, got {len(matrix)}")
        self.source = source
        self.target = target
        self.matrix = tuple(target.reduce(row) for row in matrix)
        self._lifter: LiftEngine | None = None
        if check:
            self._check()

    def _check(self):
        P = self.source.ambient
        for r in self.source.relation_vectors():
            col = [P.zero] * self.source.ngens
            for (j, e), c in r.items():
                col[j] = col[j] + P.monomial(e, c)
            img = self.apply_coeffs(col)
            if any(img):
                rel = "[" + ", ".join(str(c) for c in col) + "]"
                raise NotWellDefined(f"not well-defined: relation {rel} maps to {list(map(str, img))} != 0")

    def apply_coeffs(self, coeffs: Sequence) -> tuple:
        P = self.target.ambient
        out = [P.zero] * self.target.ngens
        for a, row in zip(coeffs, self.matrix):
            a = P(a)
            if a:
                for k, f in enumerate(row):
                    if f:
                        out[k] = out[k] + a * f
        return self.target.reduce(out)

    def __call__(self, x):
        coeffs = x.coeffs if isinstance(x, ModuleElement) else x
        return ModuleElement(self.target, self.apply_coeffs(coeffs))

    def compose(self, before: "ModuleHom") -> "ModuleHom":
        """``self ∘ before``."""
        return ModuleHom(before.source, self.target, [self.apply_coeffs(r) for r in before.matrix], check=False)

    def __matmul__(self, before: "ModuleHom") -> "ModuleHom":
        return self.compose(before)

    def __add__(self, other: "ModuleHom") -> "ModuleHom":
        return ModuleHom(self.source, self.target,
                         [[a + b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)], check=False)

    def __neg__(self):
        return ModuleHom(self.source, self.target, [[-a for a in r] for r in self.matrix], check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ModuleHom":
        P = self.target.ambient
        c = P(c)
        return ModuleHom(self.source, self.target, [[c * a for a in r] for r in self.matrix], check=False)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.matrix)

    def __eq__(self, other):
        if not isinstance(other, ModuleHom):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(self.matrix)

    def lift(self, y: Sequence) -> tuple | None:
        """Some source coefficients x with ``self(x) = y``, or None."""
        if self._lifter is None:
            self._lifter = lift_engine(self.target.ring, [list(r) for r in self.matrix],
                                       self.target.ngens, self.target.rels)
        y = self.target.reduce(y)
        if not self.source.ngens:
            return () if not any(y) else None
        a = self._lifter.lift(_col_vec(y))
        if a is None:
            return None
        return self.source.reduce(vec_to_col(self.source.ambient, a, self.source.ngens))

    def k_matrix(self) -> list[list]:
        """Matrix over k in the standard-term bases (columns = source basis)."""
        src = self.source.basis_elements()
        cols = [self.target.coords(self.apply_coeffs(b)) for b in src]
        n = self.target.k_dimension()
        return [[cols[j][i] for j in range(len(src))] for i in range(n)]

    def __repr__(self):
        rows = "; ".join("[" + ", ".join(str(c) for c in r) + "]" for r in self.matrix)
        return f"ModuleHom({self.source} -> {self.target}: {rows})"


def identity_hom(M: FPModule) -> ModuleHom:
    P = M.ambient
    return ModuleHom(M, M, [[P.one if i == j else P.zero for j in range(M.ngens)] for i in range(M.ngens)], check=False)


def zero_hom(M: FPModule, N: FPModule) -> ModuleHom:
    P = M.ambient
    return ModuleHom(M, N, [[P.zero] * N.ngens for _ in range(M.ngens)], check=False)


def hom(source: FPModule, target: FPModule, matrix: Sequence[Sequence]) -> ModuleHom:
    return ModuleHom(source, target, matrix)


def join_rings(a: QuotientRing, b: QuotientRing) -> QuotientRing:
    """The ring of P/(J_a + J_b): annihilates anything killed by both."""
    if a.ambient != b.ambient:
        raise StructuralError("rings have different ambient polynomial rings")
    if a.ideal.contains_ideal(b.ideal):
        return a
    if b.ideal.contains_ideal(a.ideal):
        return b
    return QuotientRing(a.ambient, GroebnerIdeal(a.ambient, a.ideal.basis + b.ideal.basis))


def meet_rings(a: QuotientRing, b: QuotientRing) -> QuotientRing:
    """A ring over which both are modules: the one with the smaller ideal, or P."""
    if a.ambient != b.ambient:
        raise StructuralError("rings have different ambient polynomial rings")
    if b.ideal.contains_ideal(a.ideal):
        return a
    if a.ideal.contains_ideal(b.ideal):
        return b
    return QuotientRing(a.ambient)
