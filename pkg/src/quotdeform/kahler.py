"""Kähler differentials, first principal parts with their two sections,
H^0 of the reduced Atiyah map, and conormal sequences of square-zero
extensions."""
from __future__ import annotations

from typing import Sequence

from .fpmod.module import FPModule, ModuleHom, NotWellDefined, identity_hom
from .fpmod.ops import is_exact, is_injective, is_surjective, submodule, tensor, tensor_hom
from .homext import ShortExactSequence
from .poly.quotient import GroebnerIdeal, QuotientRing
from .poly.ring import Polynomial, PolyRing, StructuralError


class NotSquareZero(ValueError):
    pass


class KahlerModule:
    """Ω of ``ring`` relative to the subring generated by the variables not in
    ``variables`` (all variables by default, i.e. over the base field).

    Generators are ``d x_i`` for the listed variables; relations are the rows
    of the Jacobian of the reduced Gröbner basis."""

    def __init__(self, ring: QuotientRing, variables: Sequence[str] | None = None):
        P = ring.ambient
        names = tuple(variables) if variables is not None else P.names
        self.ring = ring
        self.variables = names
        self.indices = [P.index(n) for n in names]
        rows = [[g.derivative(i) for i in self.indices] for g in ring.ideal.basis]
        self.module = FPModule(ring, len(names), rows, name=f"Omega({ring})")

    def d(self, f: Polynomial) -> tuple:
        f = self.ring.ambient(f)
        return self.module.reduce([f.derivative(i) for i in self.indices])

    def free_rank(self) -> int | None:
        """Rank if the module is visibly free after pruning, else None."""
        from .fpmod.ops import prune
        N, _, _ = prune(self.module)
        return N.ngens if not N.rels else None


def kahler(B: QuotientRing, variables: Sequence[str] | None = None) -> KahlerModule:
    return KahlerModule(B, variables)


def _fresh_names(taken: Sequence[str], base: Sequence[str], suffix: str = "_r") -> list[str]:
    taken = set(taken)
    out = []
    for n in base:
        m = n + suffix
        while m in taken:
            m += "_"
        taken.add(m)
        out.append(m)
    return out


class PrincipalParts:
    """``P^1(E) = ((C ⊗_B C)/I_Δ^2) ⊗_C E`` for ``C = B[x]/J`` where ``x`` are the
    ``relative`` variables.

    The doubled ring D has a second copy x' of the relative variables; the
    left factor carries the C-module structure and E is tensored on through
    the right factor, so ``P^1(E) = D^g / R_E(x')``.  The modules E and
    Ω ⊗ E are regarded over D through the multiplication map ``x' -> x``.
    """

    def __init__(self, C: QuotientRing, relative: Sequence[str], E: FPModule, extended: bool = False):
        P = C.ambient
        if E.ambient != P:
            raise StructuralError("E must be presented over the ambient ring of C")
        if not E.ring.ideal.contains_ideal(C.ideal):
            raise StructuralError("E is not a module over C")
        self.C, self.E = C, E
        self.relative = tuple(relative)
        self.rel_idx = [P.index(n) for n in relative]
        primed = _fresh_names(P.names, relative)
        PD = PolyRing(P.field, P.names + tuple(primed), P.order.__class__("grevlex"))
        self.PD = PD
        n = P.nvars
        self._left = list(PD.gens[:n])
        right = list(PD.gens[:n])
        for k, i in enumerate(self.rel_idx):
            right[i] = PD.gens[n + k]
        self._right = right
        down = list(P.gens) + [P.gens[i] for i in self.rel_idx]
        self._down = down
        diffs = [PD.gens[n + k] - PD.gens[i] for k, i in enumerate(self.rel_idx)]
        self.diffs = diffs
        JD = [self.left(g) for g in C.ideal.basis] + [self.right(g) for g in C.ideal.basis]
        JD += [diffs[a] * diffs[b] for a in range(len(diffs)) for b in range(a, len(diffs))]
        self.D = QuotientRing(PD, JD)
        g = E.ngens
        evecs = self._relation_rows(E)
        self.P1 = FPModule(self.D, g, [[self.right(c) for c in r] for r in evecs], name="P1(E)")
        self.E_D = self._restrict(E)
        self.omega = KahlerModule(C, relative)
        self.omega_E = tensor(self.omega.module, E)
        self.omega_E_D = self._restrict(self.omega_E)
        rows = []
        for i in range(len(diffs)):
            for j in range(g):
                row = [PD.zero] * g
                row[j] = diffs[i]
                rows.append(row)
        self.iota = ModuleHom(self.omega_E_D, self.P1, rows)
        self.proj = ModuleHom(self.P1, self.E_D, identity_hom(self.P1).matrix)
        self.extended = extended
        if extended:
            for r in E.rels:
                if any(r[j].degree_in(i) > 0 for j in range(g) for i in self.rel_idx):
                    raise StructuralError("E is not extended from B: a relation involves a relative variable")

    @staticmethod
    def _relation_rows(M: FPModule) -> list[list[Polynomial]]:
        P = M.ambient
        rows = []
        for v in M.relation_vectors():
            col = [P.zero] * M.ngens
            for (j, e), c in v.items():
                col[j] = col[j] + P.monomial(e, c)
            rows.append(col)
        return rows

    def _restrict(self, M: FPModule) -> FPModule:
        PD = self.PD
        rels = [[self.left(c) for c in r] for r in self._relation_rows(M)]
        for d in self.diffs:
            for j in range(M.ngens):
                row = [PD.zero] * M.ngens
                row[j] = d
                rels.append(row)
        return FPModule(self.D, M.ngens, rels)

    def left(self, f: Polynomial) -> Polynomial:
        return f.evaluate(self._left, self.PD)

    def right(self, f: Polynomial) -> Polynomial:
        return f.evaluate(self._right, self.PD)

    def down(self, f: Polynomial) -> Polynomial:
        return f.evaluate(self._down, self.C.ambient)

    # the two sections and the C-action on P^1
    def s(self, e: Sequence[Polynomial]) -> tuple:
        """``e |-> 1 ⊗ 1 ⊗ e``: B-linear, coefficients moved to the right factor."""
        return self.P1.reduce([self.right(c) for c in e])

    def t(self, e: Sequence[Polynomial]) -> tuple:
        """``c ⊗ m |-> c ⊗ 1 ⊗ 1 ⊗ m``: C-linear; needs E extended from B."""
        if not self.extended:
            raise StructuralError("t needs E = C ⊗_B M; construct with extended=True")
        return self.P1.reduce([self.left(c) for c in e])

    def act(self, c: Polynomial, w: Sequence[Polynomial]) -> tuple:
        """C acts on P^1 through the left factor."""
        lc = self.left(c)
        return self.P1.reduce([lc * a for a in w])

    def project(self, w: Sequence[Polynomial]) -> tuple:
        """``P^1(E) -> E``."""
        return self.E.reduce([self.down(a) for a in w])

    def d_tensor(self, c: Polynomial, e: Sequence[Polynomial]) -> tuple:
        """``dc ⊗ e`` in Ω ⊗ E coordinates."""
        dc = self.omega.d(c)
        return self.omega_E.reduce([a * b for a in dc for b in e])

    def include(self, z: Sequence[Polynomial]) -> tuple:
        """Ω ⊗ E -> P^1."""
        return self.iota.apply_coeffs([self.left(a) for a in z])

    def to_omega(self, w: Sequence[Polynomial]) -> tuple | None:
        """Preimage of w under Ω ⊗ E -> P^1 (None if w is not in the image)."""
        z = self.iota.lift(w)
        if z is None:
            return None
        return self.omega_E.reduce([self.down(a) for a in z])

    def verify_exact(self) -> bool:
        return is_injective(self.iota) and is_surjective(self.proj) and is_exact(self.iota, self.proj)


def principal_parts(C: QuotientRing, relative: Sequence[str], E: FPModule, extended: bool = False) -> PrincipalParts:
    return PrincipalParts(C, relative, E, extended)


def h0_beta(pp: PrincipalParts, f: ModuleHom, N: FPModule | None = None,
            inclusion: ModuleHom | None = None) -> ModuleHom:
    """``N = ker f --> Ω ⊗ F``, computed as ``(Ω ⊗ f)`` of the Ω ⊗ E part
    ``s(n) - t(n)`` of the B-linear lift of n."""
    from .fpmod.ops import kernel
    if N is None:
        N, inclusion = kernel(f)
    omega_F = tensor(pp.omega.module, f.target)
    om_f = tensor_hom(identity_hom(pp.omega.module), f, pp.omega_E, omega_F)
    rows = []
    for n in inclusion.matrix:
        w = [a - b for a, b in zip(pp.s(n), pp.t(n))]
        z = pp.to_omega(w)
        if z is None:
            raise AssertionError("s - t left the differential part")
        rows.append(om_f.apply_coeffs(z))
    return ModuleHom(N, omega_F, rows)


def h0_beta_formula(omega: KahlerModule, f: ModuleHom, N: FPModule, inclusion: ModuleHom) -> ModuleHom:
    """``c ⊗ m |-> dc ⊗ f(1 ⊗ m)`` applied to the generators of N, where
    generator j of the source of f is ``1 ⊗ m_j``."""
    omega_F = tensor(omega.module, f.target)
    gF = f.target.ngens
    P = f.target.ambient
    rows = []
    for n in inclusion.matrix:
        out = [P.zero] * (omega.module.ngens * gF)
        for j, c in enumerate(n):
            if not c:
                continue
            for i, idx in enumerate(omega.indices):
                dc = c.derivative(idx)
                if dc:
                    for l, fl in enumerate(f.matrix[j]):
                        out[i * gF + l] = out[i * gF + l] + dc * fl
        rows.append(out)
    return ModuleHom(N, omega_F, rows)


class ConormalData:
    """``I_1 --δ--> Ω_{B1'} ⊗ B1 --> Ω_{B1} --> 0`` for ``B1' = P/J' -> B1 = P/J``
    with ``δ(i) = di ⊗ 1``, plus the surjection ``J/J^2 -> J/J'``."""

    def __init__(self, B1p: QuotientRing, B1: QuotientRing):
        if B1p.ambient != B1.ambient:
            raise StructuralError("both rings must be presented over one polynomial ring")
        J, Jp = B1.ideal, B1p.ideal
        if not J.contains_ideal(Jp):
            raise StructuralError("J' is not contained in J, so B1' does not map onto B1")
        for a in J.basis:
            for b in J.basis:
                if not Jp.contains(a * b):
                    raise NotSquareZero(f"not square-zero: ({a})*({b}) is not in J'")
        self.B1p, self.B1 = B1p, B1
        P = B1.ambient
        free_p = FPModule(B1p, 1)
        gens = [[B1p(g)] for g in J.basis]
        I1_p, self.I1_incl = submodule(free_p, gens)
        self.I1 = I1_p.over(B1)
        self.I1.name = "I1"
        self.I1_gens = [g for g in J.basis]
        kp = KahlerModule(B1p)
        self.omega_p = kp
        self.omega_p_B1 = FPModule(B1, kp.module.ngens, kp.module.rels)
        self.omega = KahlerModule(B1)
        self.delta = ModuleHom(self.I1, self.omega_p_B1, [list(kp.d(g)) for g in J.basis])
        self.proj = ModuleHom(self.omega_p_B1, self.omega.module, identity_hom(self.omega_p_B1).matrix)
        self.left_exact = is_injective(self.delta)
        # J/J^2 over B1 and the canonical map onto I1
        J2 = QuotientRing(P, GroebnerIdeal(P, [a * b for a in J.gens for b in J.gens]))
        cot, _ = submodule(FPModule(J2, 1), [[g] for g in J.basis])
        self.conormal_module = cot.over(B1)
        n = len(J.basis)
        self.q = ModuleHom(self.conormal_module, self.I1,
                           [[P.one if i == j else P.zero for j in range(n)] for i in range(n)])

    def sequence(self) -> ShortExactSequence:
        if not self.left_exact:
            raise StructuralError("conormal map is not injective; the sequence is not short exact")
        return ShortExactSequence(self.delta, self.proj)


def conormal(B1p: QuotientRing, B1: QuotientRing) -> ConormalData:
    return ConormalData(B1p, B1)
