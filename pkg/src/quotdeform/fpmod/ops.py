"""Kernels, images, cokernels, sums, tensor products, Hom-modules and
two-step resolutions of finitely presented modules."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..poly.quotient import QuotientRing, RingMap, lift_engine, vec_to_col
from ..poly.ring import Polynomial, StructuralError
from .module import (FPModule, ModuleHom, NotFiniteDimensional, identity_hom, join_rings, meet_rings,
                     zero_hom, _col_vec)


def _syzygy_vectors(M: FPModule, elems: Sequence[Sequence]) -> list[tuple]:
    """Generators of ``{a : sum a_i elems_i = 0 in M}`` as coefficient tuples."""
    if not elems:
        return []
    eng = lift_engine(M.ring, [list(e) for e in elems], M.ngens, M.rels)
    P = M.ambient
    out = []
    for v in eng.syzygies():
        col = tuple(vec_to_col(P, v, len(elems)))
        if any(col):
            out.append(col)
    return out


def submodule(M: FPModule, elems: Sequence[Sequence]) -> tuple[FPModule, ModuleHom]:
    """The submodule generated by ``elems`` (kept in order, zeros included)
    and its inclusion into M."""
    elems = [M.reduce(e) for e in elems]
    S = FPModule(M.ring, len(elems), _syzygy_vectors(M, elems))
    return S, ModuleHom(S, M, elems, check=False)


def kernel(f: ModuleHom) -> tuple[FPModule, ModuleHom]:
    """Kernel of f with its inclusion into the source."""
    T, S = f.target, f.source
    if not S.ngens:
        return submodule(S, [])
    gens = _syzygy_vectors(T, [list(r) for r in f.matrix]) if T.ngens else \
        [tuple(S.ambient.one if i == j else S.ambient.zero for j in range(S.ngens)) for i in range(S.ngens)]
    gens = [g for g in (S.reduce(g) for g in gens) if any(g)]
    return submodule(S, gens)


def image(f: ModuleHom) -> tuple[FPModule, ModuleHom, ModuleHom]:
    """``(im f, source -> im f, im f -> target)``."""
    Im, incl = submodule(f.target, [list(r) for r in f.matrix])
    P = f.source.ambient
    n = f.source.ngens
    onto = ModuleHom(f.source, Im, [[P.one if i == j else P.zero for j in range(n)] for i in range(n)], check=False)
    return Im, onto, incl


def cokernel(f: ModuleHom) -> tuple[FPModule, ModuleHom]:
    T = f.target
    C = FPModule(T.ring, T.ngens, list(T.rels) + [list(r) for r in f.matrix])
    return C, ModuleHom(T, C, identity_hom(T).matrix, check=False)


def quotient_module(M: FPModule, elems: Sequence[Sequence]) -> tuple[FPModule, ModuleHom]:
    C = FPModule(M.ring, M.ngens, list(M.rels) + [list(e) for e in elems])
    return C, ModuleHom(M, C, identity_hom(M).matrix, check=False)


@dataclass
class DirectSum:
    module: FPModule
    injections: list[ModuleHom]
    projections: list[ModuleHom]
    offsets: list[int]


def direct_sum(mods: Sequence[FPModule], ring: QuotientRing | None = None) -> DirectSum:
    if ring is None:
        if not mods:
            raise StructuralError("empty direct sum needs a ring")
        ring = mods[0].ring
        for M in mods[1:]:
            ring = meet_rings(ring, M.ring)
    mods_r = [M.over(ring) for M in mods]
    total = sum(M.ngens for M in mods)
    P = ring.ambient
    rels, offsets, off = [], [], 0
    for M in mods_r:
        offsets.append(off)
        for r in M.rels:
            row = [P.zero] * total
            row[off:off + M.ngens] = r
            rels.append(row)
        off += M.ngens
    S = FPModule(ring, total, rels)
    inj, proj = [], []
    for M, o in zip(mods, offsets):
        rows = []
        for i in range(M.ngens):
            row = [P.zero] * total
            row[o + i] = P.one
            rows.append(row)
        inj.append(ModuleHom(M, S, rows, check=False))
        prow = []
        for k in range(total):
            row = [P.zero] * M.ngens
            if o <= k < o + M.ngens:
                row[k - o] = P.one
            prow.append(row)
        proj.append(ModuleHom(S, M, prow, check=False))
    return DirectSum(S, inj, proj, offsets)


def hom_from_blocks(source: FPModule, target: FPModule, blocks_src: DirectSum | None,
                    maps: Sequence[ModuleHom]) -> ModuleHom:
    """The map out of a direct sum whose restriction to summand i is ``maps[i]``."""
    rows = []
    for f in maps:
        rows.extend(f.matrix)
    return ModuleHom(source, target, rows, check=False)


def tensor(M: FPModule, N: FPModule) -> FPModule:
    """``M ⊗ N`` on generators e_i ⊗ e_j (index ``i * N.ngens + j``)."""
    ring = join_rings(M.ring, N.ring)
    P = ring.ambient
    gm, gn = M.ngens, N.ngens
    rels = []
    for r in M.rels:
        for j in range(gn):
            row = [P.zero] * (gm * gn)
            for i in range(gm):
                row[i * gn + j] = r[i]
            rels.append(row)
    for s in N.rels:
        for i in range(gm):
            row = [P.zero] * (gm * gn)
            for j in range(gn):
                row[i * gn + j] = s[j]
            rels.append(row)
    return FPModule(ring, gm * gn, rels)


def tensor_coeffs(m: Sequence[Polynomial], n: Sequence[Polynomial]) -> list[Polynomial]:
    """Coefficients of ``m ⊗ n`` in the tensor presentation."""
    return [a * b for a in m for b in n]


def tensor_hom(f: ModuleHom, g: ModuleHom, source: FPModule | None = None,
               target: FPModule | None = None) -> ModuleHom:
    source = source or tensor(f.source, g.source)
    target = target or tensor(f.target, g.target)
    rows = []
    for i in range(f.source.ngens):
        for j in range(g.source.ngens):
            rows.append(tensor_coeffs(f.matrix[i], g.matrix[j]))
    return ModuleHom(source, target, rows, check=False)


class HomModule:
    """``Hom(M, N)`` as the submodule of N^g cut out by the relations of M."""

    def __init__(self, M: FPModule, N: FPModule):
        self.M, self.N = M, N
        P = M.ambient
        g, gn = M.ngens, N.ngens
        eqs = [list(r) for r in M.rels]
        for a in M.ring.ideal.basis:
            if not N.ring.ideal.contains(a):
                for j in range(g):
                    row = [P.zero] * g
                    row[j] = a
                    eqs.append(row)
        self.power = direct_sum([N] * g, ring=N.ring) if g else None
        if g == 0:
            self.module = FPModule(N.ring, 0)
            self.inclusion = None
            return
        target = direct_sum([N] * len(eqs), ring=N.ring).module if eqs else FPModule(N.ring, 0)
        rows = []
        for j in range(g):
            for l in range(gn):
                row = [P.zero] * (len(eqs) * gn)
                for k, eq in enumerate(eqs):
                    row[k * gn + l] = eq[j]
                rows.append(row)
        psi = ModuleHom(self.power.module, target, rows, check=False)
        self.module, self.inclusion = kernel(psi)

    def to_hom(self, coeffs: Sequence) -> ModuleHom:
        M, N = self.M, self.N
        if not M.ngens:
            return zero_hom(M, N)
        flat = self.inclusion.apply_coeffs(coeffs)
        gn = N.ngens
        rows = [flat[j * gn:(j + 1) * gn] for j in range(M.ngens)]
        return ModuleHom(M, N, rows, check=False)

    def from_hom(self, f: ModuleHom) -> tuple:
        if not self.M.ngens:
            return ()
        flat = [c for r in f.matrix for c in r]
        x = self.inclusion.lift(flat)
        if x is None:
            raise StructuralError("map does not respect the relations of the source")
        return x

    def evaluate(self, h_coeffs: Sequence, m_coeffs: Sequence) -> tuple:
        return self.to_hom(h_coeffs).apply_coeffs(m_coeffs)

    def k_dimension(self) -> int:
        return self.module.k_dimension()

    def basis_homs(self) -> list[ModuleHom]:
        """Homs forming a k-basis of Hom(M, N); requires finite dimension."""
        if self.module.k_basis() is None:
            raise NotFiniteDimensional(f"Hom({self.M}, {self.N}) is not finite-dimensional")
        return [self.to_hom(b) for b in self.module.basis_elements()]


def hom_module(M: FPModule, N: FPModule) -> HomModule:
    return HomModule(M, N)


@dataclass
class ResolutionFragment:
    """``F2 --d2--> F1 --d1--> F0 --> M --> 0`` over the ring of M."""
    module: FPModule
    F0: FPModule
    F1: FPModule
    F2: FPModule
    d1: ModuleHom
    d2: ModuleHom

    def verify(self) -> bool:
        if not (self.d1 @ self.d2).is_zero():
            return False
        if not is_exact(self.d2, self.d1):
            return False
        return self.F0.ngens == self.module.ngens and len(self.module.rels) == self.F1.ngens


def resolution_fragment(M: FPModule) -> ResolutionFragment:
    R = M.ring
    F0 = FPModule(R, M.ngens)
    F1 = FPModule(R, len(M.rels))
    d1 = ModuleHom(F1, F0, [list(r) for r in M.rels], check=False)
    second = _syzygy_vectors(F0, [list(r) for r in M.rels]) if M.rels and M.ngens else \
        [tuple(1 if i == j else 0 for j in range(len(M.rels))) for i in range(len(M.rels))]
    second = [F1.reduce(s) for s in second]
    second = [s for s in second if any(s)]
    F2 = FPModule(R, len(second))
    d2 = ModuleHom(F2, F1, second, check=False)
    return ResolutionFragment(M, F0, F1, F2, d1, d2)


def is_injective(f: ModuleHom) -> bool:
    K, inc = kernel(f)
    return all(not any(r) for r in inc.matrix)


def is_surjective(f: ModuleHom) -> bool:
    P = f.target.ambient
    n = f.target.ngens
    return all(f.lift([P.one if i == j else P.zero for j in range(n)]) is not None for i in range(n))


def is_exact(f: ModuleHom, g: ModuleHom) -> bool:
    """Exactness of ``X --f--> Y --g--> Z`` at Y."""
    if not (g @ f).is_zero():
        return False
    K, inc = kernel(g)
    return all(f.lift(r) is not None for r in inc.matrix)


def is_isomorphism(f: ModuleHom, g: ModuleHom) -> bool:
    """f and g are mutually inverse."""
    return (g @ f) == identity_hom(f.source) and (f @ g) == identity_hom(f.target)


def inverse_of_iso(f: ModuleHom) -> ModuleHom | None:
    """Construct the inverse of an isomorphism by lifting target generators."""
    P = f.target.ambient
    n = f.target.ngens
    rows = []
    for i in range(n):
        x = f.lift([P.one if i == j else P.zero for j in range(n)])
        if x is None:
            return None
        rows.append(x)
    g = ModuleHom(f.target, f.source, rows, check=False)
    return g if is_isomorphism(f, g) else None


def prune(M: FPModule) -> tuple[FPModule, ModuleHom, ModuleHom]:
    """Drop generators that some relation expresses through the others.

    Returns ``(M', M -> M', M' -> M)``, mutually inverse."""
    P = M.ambient
    field = M.field
    n = M.ngens
    rels = [list(r) for r in M.rels]
    images = [[P.one if i == j else P.zero for j in range(n)] for i in range(n)]
    alive = list(range(n))
    while True:
        hit = None
        for ri, r in enumerate(rels):
            for j in alive:
                c = r[j]
                if c and c.is_constant():
                    hit = (ri, j, c.constant_coefficient())
                    break
            if hit:
                break
        if hit is None:
            break
        ri, j, c = hit
        r = rels.pop(ri)
        inv = field.inv(c)
        def eliminate(v):
            a = v[j]
            if not a:
                return v
            q = a.scale(inv)
            return [M.ring(x - q * y) for x, y in zip(v, r)]
        rels = [eliminate(s) for s in rels]
        images = [eliminate(v) for v in images]
        alive.remove(j)
    new_rels = [[r[j] for j in alive] for r in rels]
    N = FPModule(M.ring, len(alive), new_rels)
    to_new = ModuleHom(M, N, [[v[j] for j in alive] for v in images], check=False)
    to_old = ModuleHom(N, M, [[P.one if i == j else P.zero for i in range(n)] for j in alive], check=False)
    return N, to_new, to_old


def base_change(M: FPModule, phi: RingMap) -> FPModule:
    """``M ⊗ S`` along ``phi : R -> S`` (same generators, relations mapped)."""
    if phi.source.ambient != M.ambient:
        raise StructuralError("ring map does not start at the ring of the module")
    rels = []
    Pm = M.ambient
    for v in M.relation_vectors():
        col = [Pm.zero] * M.ngens
        for (j, e), c in v.items():
            col[j] = col[j] + Pm.monomial(e, c)
        rels.append([phi(x) for x in col])
    return FPModule(phi.target, M.ngens, rels)


def base_change_hom(f: ModuleHom, phi: RingMap, source: FPModule | None = None,
                    target: FPModule | None = None) -> ModuleHom:
    source = source or base_change(f.source, phi)
    target = target or base_change(f.target, phi)
    return ModuleHom(source, target, [[phi(x) for x in r] for r in f.matrix], check=False)


def rank_nullity_ok(f: ModuleHom) -> bool:
    K, _ = kernel(f)
    Im, _, _ = image(f)
    return K.k_dimension() + Im.k_dimension() == f.source.k_dimension()
