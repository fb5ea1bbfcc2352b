"""Short exact sequences, pushouts and pullbacks, and Ext^1 classes stored as
cocycles on the relations of a fixed presentation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .fpmod.module import FPModule, ModuleHom, identity_hom, meet_rings, zero_hom
from .fpmod.ops import (direct_sum, is_exact, is_injective, is_surjective, kernel, quotient_module,
                        resolution_fragment)
from .poly.quotient import QuotientRing
from .poly.ring import StructuralError


class NotExact(ValueError):
    pass


@dataclass
class ShortExactSequence:
    """``0 -> A --i--> X --p--> C -> 0``, checked on construction."""
    i: ModuleHom
    p: ModuleHom

    def __post_init__(self):
        if self.i.target is not self.p.source and self.i.target.ngens != self.p.source.ngens:
            raise StructuralError("maps are not composable")
        if not is_injective(self.i):
            raise NotExact("first map is not injective")
        if not is_surjective(self.p):
            raise NotExact("second map is not surjective")
        if not is_exact(self.i, self.p):
            raise NotExact("image of the first map differs from the kernel of the second")

    @property
    def sub(self) -> FPModule:
        return self.i.source

    @property
    def middle(self) -> FPModule:
        return self.i.target

    @property
    def quotient(self) -> FPModule:
        return self.p.target


@dataclass
class Pushout:
    module: FPModule
    from_l: ModuleHom
    from_k: ModuleHom


def pushout(i: ModuleHom, u: ModuleHom) -> Pushout:
    """``(K ⊕ L)/⟨(u(s), -i(s))⟩`` for ``i : S -> L`` and ``u : S -> K``."""
    S = i.source
    L, K = i.target, u.target
    ds = direct_sum([K, L])
    X = ds.module
    rels = list(X.rels)
    for j in range(S.ngens):
        rels.append(list(u.matrix[j]) + [-a for a in i.matrix[j]])
    M = FPModule(X.ring, X.ngens, rels)
    q = ModuleHom(X, M, identity_hom(X).matrix, check=False)
    return Pushout(M, q @ ds.injections[1], q @ ds.injections[0])


@dataclass
class Pullback:
    module: FPModule
    to_e: ModuleHom
    to_x: ModuleHom


def pullback(p: ModuleHom, q: ModuleHom) -> Pullback:
    """Kernel of ``(p, -q) : E ⊕ X -> Q``."""
    E, X = p.source, q.source
    ds = direct_sum([E, X])
    rows = [list(r) for r in p.matrix] + [[-a for a in r] for r in q.matrix]
    d = ModuleHom(ds.module, p.target, rows, check=False)
    P, inc = kernel(d)
    return Pullback(P, ds.projections[0] @ inc, ds.projections[1] @ inc)


class ExtContext:
    """The presentation data of Ext^1_R(C, A): relations of C, their
    syzygies, the coboundary map and the cocycle module."""

    def __init__(self, C: FPModule, A: FPModule, ring: QuotientRing | None = None):
        ring = ring or C.ring
        self.ring = ring
        self.C = C.over(ring)
        self.A = A
        self.res = resolution_fragment(self.C)
        P = ring.ambient
        g, r = self.C.ngens, len(self.C.rels)
        ga = A.ngens
        self.nrels = r
        self.power_r = direct_sum([A] * r, ring=A.ring) if r else None
        # coboundary: A^g -> A^r, phi |-> (sum_j rho_kj phi_j)_k
        if r:
            src = direct_sum([A] * g, ring=A.ring).module if g else FPModule(A.ring, 0)
            rows = []
            for j in range(g):
                for l in range(ga):
                    row = [P.zero] * (r * ga)
                    for k, rho in enumerate(self.C.rels):
                        row[k * ga + l] = rho[j]
                    rows.append(row)
            self.delta = ModuleHom(src, self.power_r.module, rows, check=False)
            sig = [s for s in self.res.d2.matrix]
            tgt = direct_sum([A] * len(sig), ring=A.ring).module if sig else FPModule(A.ring, 0)
            rows = []
            for k in range(r):
                for l in range(ga):
                    row = [P.zero] * (len(sig) * ga)
                    for m, s in enumerate(sig):
                        row[m * ga + l] = s[k]
                    rows.append(row)
            self.cocycle_test = ModuleHom(self.power_r.module, tgt, rows, check=False)
        else:
            self.delta = None
            self.cocycle_test = None
        self._ext = None

    def flatten(self, cocycle: Sequence[Sequence]) -> list:
        return [a for c in cocycle for a in c]

    def unflatten(self, flat: Sequence) -> tuple:
        ga = self.A.ngens
        return tuple(tuple(self.A.reduce(flat[k * ga:(k + 1) * ga])) for k in range(self.nrels))

    def is_cocycle(self, cocycle) -> bool:
        if not self.nrels:
            return True
        return not any(self.cocycle_test.apply_coeffs(self.flatten(cocycle)))

    def coboundary_preimage(self, cocycle) -> list | None:
        """phi in A^g with delta(phi) = cocycle, split by generator; None if nonzero class."""
        if not self.nrels:
            return [() for _ in range(self.C.ngens)]
        x = self.delta.lift(self.flatten(cocycle))
        if x is None:
            return None
        ga = self.A.ngens
        return [tuple(x[j * ga:(j + 1) * ga]) for j in range(self.C.ngens)]

    def ext_module(self):
        """``(Ext^1 as a module, map Ext-generators -> A^r cocycles)``."""
        if self._ext is None:
            if not self.nrels:
                Z = FPModule(self.A.ring, 0)
                self._ext = (Z, None)
            else:
                Z, incZ = kernel(self.cocycle_test)
                bgens = []
                for row in self.delta.matrix:
                    x = incZ.lift(row)
                    assert x is not None, "coboundaries must be cocycles"
                    bgens.append(x)
                Q, _ = quotient_module(Z, bgens)
                self._ext = (Q, incZ)
        return self._ext

    def dimension(self) -> int:
        return self.ext_module()[0].k_dimension()

    def basis(self) -> list["Ext1Class"]:
        Q, incZ = self.ext_module()
        if incZ is None:
            return []
        return [Ext1Class(self, self.unflatten(incZ.apply_coeffs(b))) for b in Q.basis_elements()]

    def zero(self) -> "Ext1Class":
        P = self.A.ambient
        return Ext1Class(self, tuple(tuple(P.zero for _ in range(self.A.ngens)) for _ in range(self.nrels)))

    def class_of_cocycle(self, cocycle) -> "Ext1Class":
        c = Ext1Class(self, self.unflatten(self.flatten(cocycle)))
        if not self.is_cocycle(c.cocycle):
            raise StructuralError("not a cocycle")
        return c


class Ext1Class:
    """``cocycle[k]`` is the A-coefficient vector assigned to relation k of C."""

    def __init__(self, ctx: ExtContext, cocycle: tuple):
        self.ctx = ctx
        self.cocycle = cocycle

    def _same(self, other: "Ext1Class"):
        if other.ctx is not self.ctx:
            raise StructuralError("classes live in different Ext presentations")

    def __add__(self, other: "Ext1Class") -> "Ext1Class":
        self._same(other)
        A = self.ctx.A
        return Ext1Class(self.ctx, tuple(A.reduce([a + b for a, b in zip(x, y)])
                                         for x, y in zip(self.cocycle, other.cocycle)))

    def __neg__(self) -> "Ext1Class":
        A = self.ctx.A
        return Ext1Class(self.ctx, tuple(A.reduce([-a for a in x]) for x in self.cocycle))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, r) -> "Ext1Class":
        A = self.ctx.A
        r = A.ambient(r)
        return Ext1Class(self.ctx, tuple(A.reduce([r * a for a in x]) for x in self.cocycle))

    def is_zero(self) -> bool:
        return self.ctx.coboundary_preimage(self.cocycle) is not None

    def __eq__(self, other):
        if not isinstance(other, Ext1Class):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return 0

    def coordinates(self) -> list:
        """Coordinates in the basis of ``ctx.basis()`` (finite Ext only)."""
        Q, incZ = self.ctx.ext_module()
        if incZ is None:
            return []
        z = incZ.lift(self.ctx.flatten(self.cocycle))
        return Q.coords(z)

    def __repr__(self):
        return "Ext1Class(" + "; ".join("[" + ", ".join(map(str, c)) + "]" for c in self.cocycle) + ")"


def ext1(M: FPModule, N: FPModule, ring: QuotientRing | None = None) -> ExtContext:
    return ExtContext(M, N, ring)


def class_of(ses: ShortExactSequence, ctx: ExtContext | None = None,
             ring: QuotientRing | None = None) -> Ext1Class:
    """Cocycle of the sequence: lift the generators of C to X and measure the
    relations of C in A."""
    ctx = ctx or ExtContext(ses.quotient, ses.sub, ring)
    C = ctx.C
    lifts = []
    for j in range(C.ngens):
        e = [C.ambient.one if i == j else C.ambient.zero for i in range(C.ngens)]
        x = ses.p.lift(e)
        if x is None:
            raise NotExact("quotient map is not surjective")
        lifts.append(x)
    cocycle = []
    X = ses.middle
    for rho in C.rels:
        v = [X.ambient.zero] * X.ngens
        for a, x in zip(rho, lifts):
            if a:
                v = [s + a * t for s, t in zip(v, x)]
        c = ses.i.lift(v)
        if c is None:
            raise NotExact("relation lift does not land in the submodule")
        cocycle.append(tuple(c))
    return Ext1Class(ctx, tuple(cocycle))


def realize(c: Ext1Class) -> ShortExactSequence:
    """``0 -> A -> (A ⊕ R^g)/⟨(-c_k, rho_k)⟩ -> C -> 0``."""
    ctx = c.ctx
    A, C = ctx.A, ctx.C
    ring = meet_rings(A.ring, ctx.ring)
    A_r = A.over(ring)
    P = ring.ambient
    n = A.ngens + C.ngens
    rels = []
    for r in A_r.rels:
        rels.append(list(r) + [P.zero] * C.ngens)
    for ck, rho in zip(c.cocycle, C.rels):
        rels.append([-a for a in ck] + list(rho))
    X = FPModule(ring, n, rels)
    i = ModuleHom(A, X, [[P.one if k == j else P.zero for k in range(n)] for j in range(A.ngens)], check=False)
    p_rows = [[P.zero] * C.ngens for _ in range(A.ngens)]
    p_rows += [[P.one if k == j else P.zero for k in range(C.ngens)] for j in range(C.ngens)]
    p = ModuleHom(X, C, p_rows, check=False)
    return ShortExactSequence(i, p)


@dataclass
class Splitting:
    """A section ``s : C -> X`` with ``p ∘ s = id``."""
    ses: ShortExactSequence
    section: ModuleHom

    def verify(self) -> bool:
        return (self.ses.p @ self.section) == identity_hom(self.ses.quotient)


@dataclass
class NonSplitCertificate:
    """A cocycle that is not a coboundary."""
    ext_class: Ext1Class

    def verify(self) -> bool:
        return self.ext_class.ctx.is_cocycle(self.ext_class.cocycle) and not self.ext_class.is_zero()


def splitting_test(ses: ShortExactSequence, ctx: ExtContext | None = None) -> Splitting | NonSplitCertificate:
    c = class_of(ses, ctx)
    phi = c.ctx.coboundary_preimage(c.cocycle)
    if phi is None:
        return NonSplitCertificate(c)
    C, X = c.ctx.C, ses.middle
    rows = []
    for j in range(C.ngens):
        e = [C.ambient.one if i == j else C.ambient.zero for i in range(C.ngens)]
        x = ses.p.lift(e)
        ix = ses.i.apply_coeffs(phi[j])
        rows.append([a - b for a, b in zip(x, ix)])
    section = ModuleHom(ses.quotient, X, rows)
    sp = Splitting(ses, section)
    assert sp.verify()
    return sp


def baer_sum(c1: Ext1Class, c2: Ext1Class) -> Ext1Class:
    return c1 + c2


def pushout_class(c: Ext1Class, g: ModuleHom, ctx: ExtContext | None = None) -> Ext1Class:
    """Class of the sequence pushed out along ``g : A -> A'``."""
    ctx = ctx or ExtContext(c.ctx.C, g.target, c.ctx.ring)
    return Ext1Class(ctx, tuple(g.apply_coeffs(x) for x in c.cocycle))


def pullback_class(c: Ext1Class, h: ModuleHom, ctx: ExtContext | None = None) -> Ext1Class:
    """Class of the sequence pulled back along ``h : C' -> C``, via a lift of
    h to the relation modules."""
    ctx = ctx or ExtContext(h.source, c.ctx.A, c.ctx.ring)
    Cp, C = ctx.C, c.ctx.C
    A = c.ctx.A
    d1 = c.ctx.res.d1
    P = A.ambient
    cocycle = []
    for rho in Cp.rels:
        v = [P.zero] * C.ngens
        for a, row in zip(rho, h.matrix):
            if a:
                v = [s + a * t for s, t in zip(v, row)]
        if not C.rels:
            if any(C.ring.reduce(x) for x in v):
                raise StructuralError("map does not respect relations")
            cocycle.append(tuple(P.zero for _ in range(A.ngens)))
            continue
        a = d1.lift(v)
        if a is None:
            raise StructuralError("map does not respect relations")
        w = [P.zero] * A.ngens
        for coef, ck in zip(a, c.cocycle):
            if coef:
                w = [s + coef * t for s, t in zip(w, ck)]
        cocycle.append(tuple(A.reduce(w)))
    return Ext1Class(ctx, tuple(cocycle))


def pushout_ses(ses: ShortExactSequence, g: ModuleHom) -> ShortExactSequence:
    po = pushout(ses.i, g)
    P = po.module.ambient
    # p extends by zero on the new summand
    rows = [[P.zero] * ses.quotient.ngens for _ in range(g.target.ngens)] + [list(r) for r in ses.p.matrix]
    p2 = ModuleHom(po.module, ses.quotient, rows)
    return ShortExactSequence(po.from_k, p2)


def pullback_ses(ses: ShortExactSequence, h: ModuleHom) -> ShortExactSequence:
    pb = pullback(ses.p, h)
    Pm = pb.module
    # A -> pullback: a |-> (i(a), 0); lift through the inclusion of the kernel
    ds = direct_sum([ses.middle, h.source])
    rows = []
    for r in ses.i.matrix:
        target = list(r) + [Pm.ambient.zero] * h.source.ngens
        x = _lift_into_pullback(pb, target)
        rows.append(x)
    i2 = ModuleHom(ses.sub, Pm, rows)
    return ShortExactSequence(i2, pb.to_x)


def _lift_into_pullback(pb: Pullback, flat):
    ne = pb.to_e.target.ngens
    rows = [list(a) + list(b) for a, b in zip(pb.to_e.matrix, pb.to_x.matrix)]
    ds = direct_sum([pb.to_e.target, pb.to_x.target])
    inc = ModuleHom(pb.module, ds.module, rows, check=False)
    x = inc.lift(flat)
    if x is None:
        raise StructuralError("element is not in the pullback")
    return x
