"""Validated lifting problems: a quotient f0 : E0 -> F0 over B0 = B1 ⊗ B2,
a square-zero extension B1' -> B1, a B0-module K and u0 : I ⊗ F0 -> K."""
from __future__ import annotations

from functools import cached_property
from typing import Sequence

from ..fpmod.module import FPModule, ModuleHom, NotWellDefined, identity_hom, zero_hom
from ..fpmod.ops import (HomModule, base_change, base_change_hom, is_injective, is_surjective, kernel,
                         quotient_module, tensor, tensor_hom)
from ..homext import ExtContext, ShortExactSequence
from ..kahler import ConormalData, KahlerModule, NotSquareZero
from ..poly.quotient import QuotientRing, RingMap, coproduct_ring
from ..poly.ring import StructuralError


class SetupError(ValueError):
    """A lifting problem failed one of its validation checks."""


class NotFlat(SetupError):
    pass


class DeformationSetup:
    """Everything derived from the raw data, with the exactness checks run
    during construction."""

    def __init__(self, B1: QuotientRing, B1p: QuotientRing, B2: QuotientRing, E2: FPModule,
                 f0_matrix: Sequence[Sequence], F0: FPModule, K: FPModule | None = None,
                 u0: ModuleHom | str | Sequence | None = None, name: str | None = None):
        self.name = name
        if B1.field != B2.field:
            raise SetupError("B1 and B2 must be algebras over one field")
        self.field = B1.field
        if E2.ring != B2:
            E2 = E2.over(B2)
        try:
            self.conormal = ConormalData(B1p, B1)
        except NotSquareZero:
            raise
        self.B1, self.B1p, self.B2, self.E2 = B1, B1p, B2, E2
        self.B0, self.incl1, self.incl2 = coproduct_ring(B1, B2, name="B0")
        self.B, self.incl1p, self.incl2p = coproduct_ring(B1p, B2, name="B")
        if self.B0.ambient != self.B.ambient:
            raise StructuralError("coproduct ambients differ")
        self.P = self.B0.ambient
        self.E0 = base_change(E2, self.incl2)
        self.E0.name = "E0"
        self.E = base_change(E2, self.incl2p)
        self.E.name = "E"
        F0 = F0 if F0.ambient == self.P else None
        if F0 is None:
            raise StructuralError("F0 must live over the coproduct ring")
        self.F0 = F0.over(self.B0) if F0.ring != self.B0 else F0
        self.f0 = ModuleHom(self.E0, self.F0, f0_matrix)
        if not is_surjective(self.f0):
            raise SetupError("f0 is not surjective")
        self.N0, self.N0_incl = kernel(self.f0)
        self.N0.name = "N0"
        # I = I1 ⊗ B2 and the extension 0 -> I ⊗ E0 -> E -> E0 -> 0
        self.I1 = self.conormal.I1
        self.I = base_change(self.I1, self.incl1)
        self.I.name = "I"
        self.I_gens = [self.incl1p.apply_ambient(g) for g in self.conormal.I1_gens]
        self.IE0 = tensor(self.I, self.E0)
        rows = []
        for g in self.I_gens:
            for j in range(self.E.ngens):
                row = [self.P.zero] * self.E.ngens
                row[j] = g
                rows.append(row)
        self.IE0_to_E = ModuleHom(self.IE0, self.E, rows)
        self.E_to_E0 = ModuleHom(self.E, self.E0, identity_hom(self.E).matrix)
        self.ses3 = ShortExactSequence(self.IE0_to_E, self.E_to_E0)
        self.IF0 = tensor(self.I, self.F0)
        self.IF0.name = "I(x)F0"
        self.I_f0 = tensor_hom(identity_hom(self.I), self.f0, self.IE0, self.IF0)
        if K is None:
            K = self.IF0
            if u0 is None:
                u0 = "id"
        self.K = K.over(self.B0) if K.ring != self.B0 else K
        if isinstance(u0, ModuleHom):
            self.u0 = u0
        elif u0 == "id":
            self.u0 = ModuleHom(self.IF0, self.K, identity_hom(self.IF0).matrix)
        elif u0 == "zero" or u0 is None:
            self.u0 = zero_hom(self.IF0, self.K)
        else:
            self.u0 = ModuleHom(self.IF0, self.K, u0)
        self.v = self.u0 @ self.I_f0

    @cached_property
    def ext_ctx(self) -> ExtContext:
        return ExtContext(self.N0, self.K, self.B0)

    @cached_property
    def L(self) -> tuple[FPModule, ModuleHom]:
        c = ModuleHom(self.E, self.F0, self.f0.matrix)
        L, inc = kernel(c)
        L.name = "L"
        return L, inc

    @cached_property
    def hom_group(self) -> HomModule:
        return HomModule(self.N0, self.K)

    @cached_property
    def omega_rel(self) -> KahlerModule:
        """Ω_{B1/A} ⊗ B2, i.e. Ω_{B0/B2}, on the differentials of the B1 variables."""
        return KahlerModule(self.B0, self.B1.ambient.names)

    @cached_property
    def omega_F0(self) -> FPModule:
        return tensor(self.omega_rel.module, self.F0)

    def is_u0_surjective(self) -> bool:
        return is_surjective(self.u0)

    def flatness_over_B1(self) -> bool:
        """Tensoring 0 -> N0 -> E0 -> F0 -> 0 with I1 stays exact."""
        IN0 = tensor(self.I, self.N0)
        m = tensor_hom(identity_hom(self.I), self.N0_incl, IN0, self.IE0)
        return is_injective(m)

    def describe(self) -> dict:
        return {
            "B0": repr(self.B0), "B": repr(self.B),
            "N0_gens": len(self.N0_incl.matrix),
        }


def build_setup(B1: QuotientRing, B1p: QuotientRing, B2: QuotientRing, E2: FPModule,
                n0: Sequence[Sequence] | None = None, F0: FPModule | None = None,
                f0_matrix: Sequence[Sequence] | None = None, K: FPModule | None = None,
                u0=None, name: str | None = None) -> DeformationSetup:
    """Either ``n0`` (generators of the kernel, as E0 coefficient vectors over
    the coproduct ring; F0 is then the quotient) or ``F0`` with ``f0_matrix``."""
    if n0 is not None:
        B0, _, inc2 = coproduct_ring(B1, B2)
        E0 = base_change(E2.over(B2) if E2.ring != B2 else E2, inc2)
        P = B0.ambient
        gens = [[P(c) for c in v] for v in n0]
        F0, _ = quotient_module(E0, gens)
        F0.name = "F0"
        f0_matrix = identity_hom(E0).matrix
    if F0 is None or f0_matrix is None:
        raise SetupError("need the quotient data: n0, or F0 with f0_matrix")
    return DeformationSetup(B1, B1p, B2, E2, f0_matrix, F0, K, u0, name)


def flat_problem(B1: QuotientRing, B1p: QuotientRing, B2: QuotientRing, E2: FPModule,
                 n0: Sequence[Sequence] | None = None, F0: FPModule | None = None,
                 f0_matrix: Sequence[Sequence] | None = None, name: str | None = None) -> DeformationSetup:
    """K = I ⊗ F0 and u0 = id; F0 must be flat over B1."""
    S = build_setup(B1, B1p, B2, E2, n0=n0, F0=F0, f0_matrix=f0_matrix, name=name)
    if not S.flatness_over_B1():
        raise NotFlat("flatness failure: I1 ⊗ N0 -> I1 ⊗ E0 is not injective")
    return S
