"""Trivial square-zero extensions B1[I1], their algebra sections, and the
solutions obtained by base change along a section."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from ..fpmod.module import FPModule, ModuleHom, NotWellDefined, identity_hom
from ..fpmod.ops import tensor
from ..poly.quotient import QuotientRing, RingMap
from ..poly.ring import Polynomial, PolyRing, StructuralError
from .obstruction import Solution, h0_ra, torsor_difference
from .setup import DeformationSetup, SetupError, flat_problem


class NotASection(ValueError):
    pass


def trivial_extension(B1: QuotientRing, I1: FPModule, prefix: str = "z") -> tuple[QuotientRing, QuotientRing]:
    """``(B1, B1[I1])`` on a common ambient ring with one new variable per
    generator of I1: ``B1 = P[z]/(J, z)`` and ``B1[I1] = P[z]/(J, z·z, rels·z)``."""
    P = B1.ambient
    if I1.ambient != P:
        raise StructuralError("I1 must be presented over the ambient ring of B1")
    names = []
    for a in range(I1.ngens):
        n = f"{prefix}{a + 1}" if I1.ngens > 1 else prefix
        while n in P.names or n in names:
            n += "_"
        names.append(n)
    Q = PolyRing(P.field, P.names + tuple(names), P.order)
    emb = list(Q.gens[:P.nvars])
    z = list(Q.gens[P.nvars:])

    def up(f: Polynomial) -> Polynomial:
        return f.evaluate(emb, Q)

    J = [up(g) for g in B1.ideal.basis]
    J1 = J + z
    Jp = J + [z[a] * z[b] for a in range(len(z)) for b in range(a, len(z))]
    for v in I1.relation_vectors():
        expr = Q.zero
        for (a, e), c in v.items():
            expr = expr + up(P.monomial(e, c)) * z[a]
        Jp.append(expr)
    return QuotientRing(Q, J1, name="B1"), QuotientRing(Q, Jp, name="B1[I1]")


@dataclass
class Section:
    """``x_i |-> x_i + deltas[i]`` on the non-extension variables of B1,
    extension variables to 0.  ``deltas[i]`` is an element of B1[I1] lying in I1."""
    setup: DeformationSetup
    deltas: tuple

    @property
    def ring_map(self) -> RingMap:
        S = self.setup
        P1 = S.B1.ambient
        ext = _extension_vars(S)
        images = []
        for i, n in enumerate(P1.names):
            if n in ext:
                images.append(P1.zero)
            else:
                images.append(P1.gens[i] + self.deltas[i])
        return RingMap(S.B1, S.B1p, images)

    def apply(self, f: Polynomial) -> Polynomial:
        """The section on B0-coefficients, as a substitution on the ambient of B."""
        S = self.setup
        P = S.P
        ext = _extension_vars(S)
        images = []
        n1 = S.B1.ambient.nvars
        for i, n in enumerate(P.names):
            if i < n1 and n in ext:
                images.append(P.zero)
            elif i < n1:
                images.append(P.gens[i] + S.incl1p.apply_ambient(self.deltas[i]))
            else:
                images.append(P.gens[i])
        return S.B(f.evaluate(images, P))


def _extension_vars(S: DeformationSetup) -> set[str]:
    """Variables of B1 that are zero in B1 (the generators of I1)."""
    P1 = S.B1.ambient
    return {n for n in P1.names if S.B1.is_zero(P1.var(n)) and not S.B1p.is_zero(P1.var(n))}


def make_section(S: DeformationSetup, deltas: Sequence) -> Section:
    P1 = S.B1.ambient
    ds = []
    ext = _extension_vars(S)
    for i, n in enumerate(P1.names):
        d = S.B1p(P1(deltas[i])) if i < len(deltas) else P1.zero
        if n in ext:
            d = P1.zero
        if not S.B1.is_zero(d):
            raise NotASection(f"s({n}) - {n} = {d} is not in I1")
        ds.append(d)
    sec = Section(S, tuple(ds))
    try:
        sec.ring_map
    except StructuralError as e:
        raise NotASection(f"not multiplicative: {e}")
    return sec


def zero_section(S: DeformationSetup) -> Section:
    return make_section(S, [S.B1.ambient.zero] * S.B1.ambient.nvars)


def section_solution(S: DeformationSetup, sec: Section) -> Solution:
    """``F_s = B1[I1] ⊗_s F0`` with ``E -> F_s`` given by the section applied to f0."""
    F0 = S.F0
    P = S.P
    rels = []
    for v in F0.relation_vectors():
        col = [P.zero] * F0.ngens
        for (j, e), c in v.items():
            col[j] = col[j] + P.monomial(e, c)
        rels.append([sec.apply(c) for c in col])
    Fs = FPModule(S.B, F0.ngens, rels, name="F_s")
    f = ModuleHom(S.E, Fs, [[sec.apply(c) for c in row] for row in S.f0.matrix])
    rows = []
    for g in S.I_gens:
        for l in range(F0.ngens):
            row = [P.zero] * F0.ngens
            row[l] = g
            rows.append(row)
    kappa = ModuleHom(S.K, Fs, rows)
    proj = ModuleHom(Fs, F0, identity_hom(Fs).matrix)
    sol = Solution(S, Fs, kappa, proj, f)
    return sol


def section_to_derivation(S: DeformationSetup, sec: Section):
    """``(d_s, g_s)``: the derivation ``b |-> s(b) - s0(b)`` into I1 and the
    induced ``Ω_{B1} -> I1``."""
    cd = S.conormal
    P1 = S.B1.ambient
    s = sec.ring_map

    def d_s(b: Polynomial) -> tuple:
        b = P1(b)
        val = S.B1p(s(b) - zero_section(S).ring_map(b)) if sec.deltas else P1.zero
        x = cd.I1_incl.lift([val])
        if x is None:
            raise NotASection("value outside I1")
        return x

    rows = [d_s(P1.gens[i]) for i in cd.omega.indices]
    try:
        g_s = ModuleHom(cd.omega.module, cd.I1, rows)
    except NotWellDefined as e:
        raise NotASection(str(e))
    return d_s, g_s


def difference_sides(S: DeformationSetup, sec: Section) -> tuple[ModuleHom, ModuleHom]:
    """Torsor difference of ``s*f0`` against ``s0*f0``, and ``(g_s ⊗ F0) ∘ h0_ra``."""
    base = section_solution(S, zero_section(S))
    sol = section_solution(S, sec)
    left = torsor_difference(S, sol, base)
    _, g_s = section_to_derivation(S, sec)
    rows = [[S.incl1.apply_ambient(c) for c in r] for r in g_s.matrix]
    gF0 = derivation_tensor_F0(rows, S.omega_F0, S.IF0, S.F0.ngens)
    right = ModuleHom(S.N0, S.K, (gF0 @ h0_ra(S)).matrix)
    return left, right


def derivation_tensor_F0(rows: Sequence[Sequence[Polynomial]], omega_F0: FPModule, IF0: FPModule,
                         nF0: int) -> ModuleHom:
    """``g ⊗ F0 : Ω ⊗ F0 -> I ⊗ F0`` from the images ``rows[i] = g(dx_i)``."""
    P = omega_F0.ambient
    nI = len(rows[0]) if rows else 0
    out = []
    for img in rows:
        for l in range(nF0):
            row = [P.zero] * (nI * nF0)
            for a in range(nI):
                row[a * nF0 + l] = img[a]
            out.append(row)
    return ModuleHom(omega_F0, IF0, out)


def random_section(S: DeformationSetup, rng: random.Random, degree: int = 2, attempts: int = 200) -> Section:
    """Random deltas: random combinations of the generators of I1 with
    random coefficients of bounded degree, retried until multiplicative."""
    P1 = S.B1.ambient
    field = P1.field
    cd = S.conormal
    gens = [g for g in cd.I1_gens if not S.B1p.is_zero(g)]
    base_vars = [i for i, n in enumerate(P1.names) if n not in _extension_vars(S)]
    for _ in range(attempts):
        deltas = [P1.zero] * P1.nvars
        for i in base_vars:
            d = P1.zero
            for g in gens:
                c = P1.zero
                for e in _small_monomials(P1, base_vars, degree):
                    c = c + P1.monomial(e, field.random_element(rng))
                d = d + c * g
            deltas[i] = d
        try:
            sec = make_section(S, deltas)
            section_to_derivation(S, sec)
            return sec
        except NotASection:
            continue
    raise NotASection("no multiplicative section found")


def _small_monomials(P: PolyRing, idx, degree):
    out = [(0,) * P.nvars]
    for _ in range(degree):
        new = []
        for e in out:
            for i in idx:
                f = list(e)
                f[i] += 1
                new.append(tuple(f))
        out = sorted(set(out) | set(new))
    return out
