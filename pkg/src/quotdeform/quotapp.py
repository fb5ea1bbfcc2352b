"""Quot-functor applications: tangent spaces, the map β̄(I), perfect-quotient
checks and the Ext-level injectivity probe."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .fpmod.module import FPModule, ModuleHom, NotFiniteDimensional, identity_hom, zero_hom
from .fpmod.ops import (HomModule, base_change, base_change_hom, is_injective, is_isomorphism, kernel,
                        tensor, tensor_hom)
from .homext import ExtContext, ShortExactSequence, class_of, pullback_class, realize
from .kahler import KahlerModule, h0_beta_formula
from .linalg import rank
from .poly.field import GF
from .poly.groebner import Basis, TermOrder, groebner_vectors
from .poly.quotient import QuotientRing, coproduct_ring, vec_to_col
from .poly.ring import PolyRing, Polynomial, StructuralError
from .deform.sections import derivation_tensor_F0, trivial_extension
from .deform.setup import DeformationSetup, NotFlat, flat_problem
from .deform import oracle as _oracle


class QuotPoint:
    """A family quotient ``f0 : E0 -> F0`` over ``B0 = B1 ⊗ B2``, flat over B1
    (checked against the residue field at the origin of B1)."""

    def __init__(self, B1: QuotientRing, B2: QuotientRing, E2: FPModule, n0: Sequence[Sequence], name=None):
        self.name = name
        self.B1, self.B2 = B1, B2
        self.E2 = E2 if E2.ring == B2 else E2.over(B2)
        self.B0, self.incl1, self.incl2 = coproduct_ring(B1, B2, name="B0")
        self.P = self.B0.ambient
        self.E0 = base_change(self.E2, self.incl2)
        self.n0 = [[self.P(c) for c in v] for v in n0]
        self.F0 = FPModule(self.B0, self.E0.ngens, self.n0, name="F0")
        self.f0 = ModuleHom(self.E0, self.F0, identity_hom(self.E0).matrix)
        self.N0, self.N0_incl = kernel(self.f0)
        self.N0.name = "N0"
        if not self.is_flat_against(self.residue_field()):
            raise NotFlat("F0 is not flat over B1 at the origin (Tor_1 with the residue field is nonzero)")

    @classmethod
    def from_setup(cls, S: DeformationSetup) -> "QuotPoint":
        return cls(S.B1, S.B2, S.E2, [list(r) for r in S.N0_incl.matrix], name=S.name)

    def residue_field(self) -> FPModule:
        P1 = self.B1.ambient
        return FPModule(self.B1, 1, [[x] for x in P1.gens])

    def over_B0(self, I: FPModule) -> FPModule:
        if I.ring != self.B1:
            I = I.over(self.B1)
        return base_change(I, self.incl1)

    def is_flat_against(self, I: FPModule) -> bool:
        I0 = self.over_B0(I)
        IN0 = tensor(I0, self.N0)
        IE0 = tensor(I0, self.E0)
        return is_injective(tensor_hom(identity_hom(I0), self.N0_incl, IN0, IE0))

    @cached_property
    def omega_B1(self) -> KahlerModule:
        return KahlerModule(self.B1)

    @cached_property
    def omega_rel(self) -> KahlerModule:
        return KahlerModule(self.B0, self.B1.ambient.names)

    @cached_property
    def omega_F0(self) -> FPModule:
        return tensor(self.omega_rel.module, self.F0)

    @cached_property
    def h0_ra(self) -> ModuleHom:
        return h0_beta_formula(self.omega_rel, self.f0, self.N0, self.N0_incl)

    def with_field(self, p: int) -> "QuotPoint":
        """The same point with coefficients reduced mod p."""
        F = GF(p)
        B1 = _ring_over(self.B1, F)
        B2 = _ring_over(self.B2, F)
        E2 = FPModule(B2, self.E2.ngens, [[_poly_over(c, B2.ambient) for c in r] for r in self.E2.rels])
        B0, _, _ = coproduct_ring(B1, B2)
        n0 = [[_poly_over(c, B0.ambient) for c in v] for v in self.n0]
        return QuotPoint(B1, B2, E2, n0, name=self.name)


def _ring_over(Q: QuotientRing, F) -> QuotientRing:
    P = PolyRing(F, Q.ambient.names, Q.ambient.order)
    return QuotientRing(P, [_poly_over(g, P) for g in Q.ideal.gens], name=Q.name)


def _poly_over(f: Polynomial, P: PolyRing) -> Polynomial:
    return P.from_dict({e: P.field(c) for e, c in f.coeffs.items()})


def module_over_field(M: FPModule, ring: QuotientRing) -> FPModule:
    return FPModule(ring, M.ngens, [[_poly_over(c, ring.ambient) for c in r] for r in M.rels], name=M.name)


# ---------------------------------------------------------------- tangent spaces

@dataclass
class TangentReport:
    finite: bool
    dimension: int | None
    basis: list
    hom: HomModule


def tangent(point: QuotPoint | DeformationSetup, I: FPModule | None = None) -> TangentReport:
    """``Hom_{B0}(N0, I ⊗ F0)``; for B1 = k and I = k the Zariski tangent space."""
    if isinstance(point, DeformationSetup):
        point = QuotPoint.from_setup(point)
    I = I if I is not None else FPModule(point.B1, 1)
    IF0 = tensor(point.over_B0(I), point.F0)
    H = HomModule(point.N0, IF0)
    try:
        dim = H.k_dimension()
    except NotFiniteDimensional:
        return TangentReport(False, None, [], H)
    return TangentReport(True, dim, H.basis_homs(), H)


def first_order_problem(point: QuotPoint, I: FPModule) -> DeformationSetup:
    """The trivialized problem over ``B1[I] -> B1`` with K = I ⊗ F0."""
    B1s, B1p = trivial_extension(point.B1, I if I.ring == point.B1 else I.over(point.B1))
    n1 = point.B1.ambient.nvars
    nz = B1s.ambient.nvars - n1
    B, _, _ = coproduct_ring(B1s, point.B2)
    P = B.ambient

    def lift(c):
        return P.from_dict({e[:n1] + (0,) * nz + e[n1:]: a for e, a in c.coeffs.items()})

    n0 = [[lift(c) for c in v] for v in point.n0]
    return flat_problem(B1s, B1p, point.B2, point.E2, n0=n0, name=point.name)


# ---------------------------------------------------------------- β̄

@dataclass
class BetabarReport:
    module: str
    source_dim: int | None
    target_dim: int | None
    matrix: list
    rank: int | None
    injective: bool
    surjective: bool
    level: str = "k-matrix"

    @property
    def isomorphism(self) -> bool:
        return self.injective and self.surjective


def betabar_hom(point: QuotPoint, I: FPModule, g: ModuleHom, IF0: FPModule | None = None) -> ModuleHom:
    """``(g ⊗ F0) ∘ h0_ra`` for ``g : Ω_{B1} -> I``."""
    I0 = point.over_B0(I)
    IF0 = IF0 or tensor(I0, point.F0)
    rows = [[point.incl1.apply_ambient(c) for c in r] for r in g.matrix]
    gF = derivation_tensor_F0(rows, point.omega_F0, IF0, point.F0.ngens)
    return gF @ ModuleHom(point.N0, point.omega_F0, point.h0_ra.matrix)


def betabar(point: QuotPoint, I: FPModule, name: str = "I") -> BetabarReport:
    """β̄(I) : Hom(Ω_{B1}, I) -> Hom(N0, I ⊗ F0) as a matrix over k, or at
    module level through the push-forward to B1 when I is infinite over k."""
    I = I if I.ring == point.B1 else I.over(point.B1)
    src = HomModule(point.omega_B1.module, I)
    IF0 = tensor(point.over_B0(I), point.F0)
    tgt = HomModule(point.N0, IF0)
    try:
        sdim = src.k_dimension()
        tdim = tgt.k_dimension()
    except NotFiniteDimensional:
        return _betabar_module_level(point, I, src, tgt, IF0, name)
    cols = []
    for g in src.basis_homs():
        h = betabar_hom(point, I, g, IF0)
        cols.append(tgt.module.coords(tgt.from_hom(h)) if tdim else [])
    field = point.B0.field
    matrix = [[cols[j][i] for j in range(sdim)] for i in range(tdim)]
    r = rank(field, matrix) if sdim and tdim else 0
    return BetabarReport(name, sdim, tdim, matrix, r, r == sdim, r == tdim)


def _betabar_module_level(point, I, src, tgt, IF0, name) -> BetabarReport:
    pf = pushforward(tgt.module, point.B1)
    rows = []
    for j in range(src.module.ngens):
        e = [src.module.ambient.one if i == j else src.module.ambient.zero for i in range(src.module.ngens)]
        g = src.to_hom(e)
        h = betabar_hom(point, I, g, IF0)
        rows.append(pf.coords(tgt.from_hom(h)))
    src_mod = src.module
    f = ModuleHom(src_mod, pf.module, rows)
    inj = is_injective(f)
    from .fpmod.ops import is_surjective
    surj = is_surjective(f)
    return BetabarReport(name, None, None, [list(map(str, r)) for r in rows], None, inj, surj, "module")


# ---------------------------------------------------------------- push-forward to B1

@dataclass
class Pushforward:
    module: FPModule
    gens: list  # (position, y-exponents)
    basis: Basis
    n1: int
    source_ambient: PolyRing

    def coords(self, coeffs: Sequence) -> list:
        """Coefficients over B1 of an element given by B0-coefficients."""
        src_ring = self.source_ambient
        v = {}
        for pos, c in enumerate(coeffs):
            for e, a in src_ring(c).coeffs.items():
                v[(pos, e)] = a
        r = self.basis.reduce(v)
        P1 = self.module.ambient
        out = [P1.zero] * len(self.gens)
        index = {g: i for i, g in enumerate(self.gens)}
        for (pos, e), a in r.items():
            i = index.get((pos, e[self.n1:]))
            if i is None:
                raise StructuralError("normal form leaves the push-forward generators")
            out[i] = out[i] + P1.monomial(e[:self.n1], a)
        return out


def pushforward(M: FPModule, B1: QuotientRing, max_gens: int = 500) -> Pushforward:
    """M over ``B0 = B1 ⊗ B2`` viewed as a B1-module; needs M finite over B1.

    Generators are the y-monomials (y = variables of B2) standard for a
    y-degree-first order; relations are the y-free syzygies, found by an
    elimination Gröbner basis on tagged generators."""
    P = M.ambient
    n1 = B1.ambient.nvars
    if P.names[:n1] != B1.ambient.names:
        raise StructuralError("the ambient ring of M must start with the variables of B1")
    p = P.field.characteristic

    def ydeg(e):
        return sum(e[n1:])

    order = TermOrder(P.order, prefix=lambda pos, e: (ydeg(e),))
    G = groebner_vectors(M.relation_vectors(), order, p)
    leads = [order.lead(v) for v in G]
    pure = [(pos, e) for pos, e in leads if not any(e[:n1])]

    def standard(pos, y):
        return not any(lp == pos and all(a <= b for a, b in zip(le[n1:], y)) for lp, le in pure)

    gens = []
    frontier = [(j, (0,) * (P.nvars - n1)) for j in range(M.ngens)]
    seen = set()
    while frontier:
        t = frontier.pop(0)
        if t in seen:
            continue
        seen.add(t)
        if not standard(*t):
            continue
        gens.append(t)
        if len(gens) > max_gens:
            raise NotFiniteDimensional("module is not finite over B1 within the generator bound")
        pos, y = t
        for v in range(len(y)):
            z = list(y)
            z[v] += 1
            frontier.append((pos, tuple(z)))
    gens.sort(key=lambda t: (t[0], sum(t[1]), t[1]))
    g = M.ngens
    m = len(gens)

    def tagged_prefix(pos, e):
        return (1, 0) if pos < g else (0, ydeg(e))

    torder = TermOrder(P.order, prefix=tagged_prefix)
    vecs = []
    for i, (pos, y) in enumerate(gens):
        e = (0,) * n1 + y
        vecs.append({(pos, e): P.field.one, (g + i, (0,) * P.nvars): P.field.one})
    vecs.extend(G)
    TG = groebner_vectors(vecs, torder, p)
    P1 = B1.ambient
    rels = []
    for v in TG:
        if all(pos >= g and not any(e[n1:]) for pos, e in v):
            col = [P1.zero] * m
            for (pos, e), c in v.items():
                col[pos - g] = col[pos - g] + P1.monomial(e[:n1], c)
            rels.append(col)
    return Pushforward(FPModule(B1, m, rels, name=f"{M.name or 'M'}|B1"), gens, Basis(order, p, G), n1, P)


# ---------------------------------------------------------------- perfect quotients

@dataclass
class EnumerationCheck:
    p: int
    sections: int
    solutions: int
    injective: bool
    surjective: bool

    @property
    def bijective(self) -> bool:
        return self.injective and self.surjective


@dataclass
class PerfectEntry:
    module: str
    betabar: BetabarReport
    enumeration: EnumerationCheck | None
    note: str = ""

    @property
    def agree(self) -> bool | None:
        if self.enumeration is None:
            return None
        return self.enumeration.bijective == self.betabar.isomorphism


@dataclass
class PerfectQuotientReport:
    entries: list = field(default_factory=list)
    partial: bool = False

    @property
    def perfect(self) -> bool:
        return all(e.betabar.isomorphism for e in self.entries)

    @property
    def consistent(self) -> bool:
        return all(e.agree is not False for e in self.entries)


def standard_battery(B1: QuotientRing) -> list[tuple[str, FPModule]]:
    """k, k[u]/(u^m) for m = 2, 3 along the first variable, free modules of rank
    1 and 2, and ``k ⊕ k[u]/(u^2)``.  Modules that coincide are listed once."""
    P1 = B1.ambient
    out = [("k", FPModule(B1, 1, [[x] for x in P1.gens]))]
    if P1.nvars:
        u = P1.gens[0]
        rest = [[x] for x in P1.gens[1:]]
        for m in (2, 3):
            M = FPModule(B1, 1, [[u ** m]] + rest)
            if M.is_finite() and M.k_dimension() == m:
                out.append((f"k[{P1.names[0]}]/({P1.names[0]}^{m})", M))
        z = P1.zero
        ns = FPModule(B1, 2, [[x, z] for x in P1.gens] + [[z, u ** 2]] + [[z, x[0]] for x in rest])
        if ns.is_finite() and ns.k_dimension() == 3:
            out.append((f"k+k[{P1.names[0]}]/({P1.names[0]}^2)", ns))
    out.append(("B1", FPModule(B1, 1)))
    out.append(("B1^2", FPModule(B1, 2)))
    return out


def section_solution_check(point: QuotPoint, I: FPModule, cap: int | None = None,
                           d0: int | None = None) -> EnumerationCheck:
    """Count sections of ``B1[I] -> B1`` and flat lifts over it by enumeration,
    and test whether ``s |-> s*f0`` is a bijection."""
    p = point.B0.field.characteristic
    if not p:
        raise _oracle.OracleError("enumeration runs over a prime field; use QuotPoint.with_field")
    S = first_order_problem(point, I)
    P = S.P
    n1 = point.B1.ambient.nvars
    pd = lambda f: _oracle.poly_dict(P(f), p)
    ring_gens = [pd(h) for h in S.B.ideal.basis]
    E_rels = [_oracle.col_vec(r, p) for r in S.E.rels]
    n0 = [_oracle.col_vec(v, p) for v in S.N0_incl.matrix]
    I_gens = [pd(g) for g in S.I_gens]
    g = S.E.ngens
    top = max((c.total_degree() for v in S.N0_incl.matrix for c in v if c), default=0)
    dims_hint = d0 or max(3, top + 1)

    def build(d):
        return _oracle.FlatLiftOracle(p, P.nvars, ring_gens, g, E_rels, n0, I_gens, d)

    orc, sols = _oracle.stable_flat_enumeration(build, dims_hint, cap)
    P1z = S.B1.ambient
    Ifin = _oracle.FiniteModule(p, n1, I.ngens, list(I.relation_vectors()))
    ring1 = [_oracle.poly_dict(h, p) for h in point.B1.ideal.basis]
    sections = _oracle.enumerate_derivation_values(p, n1, list(range(n1)), ring1, Ifin, cap)
    nz = P1z.nvars - n1
    images_base = []
    for i in range(P.nvars):
        e = tuple(1 if k == i else 0 for k in range(P.nvars))
        images_base.append({e: 1})
    hits = []
    for ds in sections:
        images = [dict(x) for x in images_base]
        for i in range(n1):
            for coef, (pos, ex) in zip(ds[i], Ifin.basis_terms):
                if coef:
                    e = ex[:n1] + tuple(1 if k == pos else 0 for k in range(nz)) + (0,) * (P.nvars - n1 - nz)
                    images[i][e] = (images[i].get(e, 0) + int(coef)) % p
        diffs = [_oracle.add_vecs(_oracle.substitute(n, images, p), n, p, -1) for n in orc.n0]
        hits.append(orc.coordinates(diffs))
    valid = set(sols)
    injective = len(set(hits)) == len(hits)
    surjective = set(hits) == valid
    if any(h not in valid for h in hits):
        surjective = False
    return EnumerationCheck(p, len(sections), len(sols), injective, surjective)


def perfect_check(point: QuotPoint, modules: Sequence[tuple[str, FPModule]] | None = None,
                  p: int | None = None, cap: int | None = None) -> PerfectQuotientReport:
    """β̄ verdicts for each test module, with the section/solution enumeration
    over GF(p) wherever the module is finite over k."""
    modules = list(modules) if modules is not None else standard_battery(point.B1)
    rep = PerfectQuotientReport()
    char = point.B0.field.characteristic
    enum_point = None
    if char:
        enum_point = point
    elif p:
        enum_point = point.with_field(p)
    for name, I in modules:
        b = betabar(point, I, name)
        check = None
        note = ""
        if enum_point is not None and I.is_finite():
            Ip = I if enum_point is point else module_over_field(I, enum_point.B1)
            try:
                check = section_solution_check(enum_point, Ip, cap)
            except _oracle.CapExceeded as e:
                rep.partial = True
                note = f"enumeration skipped: {e}"
        elif not I.is_finite():
            note = "enumeration skipped: infinite over k"
        rep.entries.append(PerfectEntry(name, b, check, note))
    return rep


# ---------------------------------------------------------------- Ext-level probe

@dataclass
class ExtProbeReport:
    source_dim: int
    target_dim: int
    kernel_dim: int
    matrix: list

    @property
    def injective(self) -> bool:
        return self.kernel_dim == 0


def ext_injectivity_probe(point: QuotPoint, I: FPModule) -> ExtProbeReport:
    """The map ``Ext^1_{B1}(Ω_{B1}, I) -> Ext^1_{B0}(N0, I ⊗ F0)``: base change an
    extension to B0, tensor with F0, pull back along h0_ra."""
    I = I if I.ring == point.B1 else I.over(point.B1)
    Om = point.omega_B1.module
    src = ExtContext(Om, I, point.B1)
    I0 = point.over_B0(I)
    IF0 = tensor(I0, point.F0)
    tgt = ExtContext(point.N0, IF0, point.B0)
    basis = src.basis()
    tdim = tgt.dimension()
    cols = []
    idF = identity_hom(point.F0)
    mid = ExtContext(point.omega_F0, IF0, point.B0)
    ra = ModuleHom(point.N0, point.omega_F0, point.h0_ra.matrix)
    for c in basis:
        ses = realize(c)
        A0 = base_change(ses.sub.over(point.B1) if ses.sub.ring != point.B1 else ses.sub, point.incl1)
        X0 = base_change(ses.middle.over(point.B1) if ses.middle.ring != point.B1 else ses.middle, point.incl1)
        C0 = base_change(Om, point.incl1)
        i0 = base_change_hom(ses.i, point.incl1, A0, X0)
        p0 = base_change_hom(ses.p, point.incl1, X0, C0)
        AF, XF, CF = tensor(A0, point.F0), tensor(X0, point.F0), tensor(C0, point.F0)
        iF = tensor_hom(i0, idF, AF, XF)
        pF = tensor_hom(p0, idF, XF, CF)
        seq = ShortExactSequence(ModuleHom(IF0, XF, iF.matrix), ModuleHom(XF, point.omega_F0, pF.matrix))
        cls = class_of(seq, mid)
        pulled = pullback_class(cls, ra, tgt)
        cols.append(pulled.coordinates() if tdim else [])
    sdim = len(basis)
    matrix = [[cols[j][i] for j in range(sdim)] for i in range(tdim)]
    r = rank(point.B0.field, matrix) if sdim and tdim else 0
    return ExtProbeReport(sdim, tdim, sdim - r, matrix)
