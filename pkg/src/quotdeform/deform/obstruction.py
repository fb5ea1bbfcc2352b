"""The obstruction class by pushout of the kernel sequence, solutions as
retractions, the torsor of solutions, and the factorization through the
conormal class."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from ..fpmod.module import FPModule, ModuleHom, identity_hom
from ..fpmod.ops import base_change, base_change_hom, is_injective, kernel, tensor, tensor_hom
from ..homext import (Ext1Class, NonSplitCertificate, ShortExactSequence, Splitting, class_of,
                      pullback_class, pushout, pushout_class, splitting_test)
from ..kahler import h0_beta_formula
from .setup import DeformationSetup


class RouteUnavailable(ValueError):
    pass


@dataclass
class Solution:
    """``f : E -> F`` with ``0 -> K -> F -> F0 -> 0`` (maps ``kappa``, ``proj``)."""
    setup: DeformationSetup
    F: FPModule
    kappa: ModuleHom
    proj: ModuleHom
    f: ModuleHom

    @cached_property
    def ses(self) -> ShortExactSequence:
        return ShortExactSequence(self.kappa, self.proj)

    def verify(self) -> bool:
        S = self.setup
        self.ses
        left = self.f @ S.IE0_to_E
        if left != self.kappa @ S.v:
            return False
        return (self.proj @ self.f) == (S.f0 @ S.E_to_E0)

    @cached_property
    def retraction(self) -> ModuleHom:
        """``s : L -> K`` with ``kappa ∘ s = f`` on L."""
        L, inc = self.setup.L
        rows = []
        for l in inc.matrix:
            k = self.kappa.lift(self.f.apply_coeffs(l))
            if k is None:
                raise AssertionError("f does not send L into K")
            rows.append(k)
        return ModuleHom(L, self.setup.K, rows)

    def same_as(self, other: "Solution") -> bool:
        """Isomorphic as morphisms of extensions."""
        return self.retraction == other.retraction

    def is_flat_lift(self) -> bool:
        """I ⊗ F -> F injective (flatness over B1' given flatness of F0 over B1)."""
        S = self.setup
        IF = tensor(S.I, self.F)
        rows = []
        for g in S.I_gens:
            for l in range(self.F.ngens):
                row = [S.P.zero] * self.F.ngens
                row[l] = g
                rows.append(row)
        return is_injective(ModuleHom(IF, self.F, rows))


@dataclass
class ObstructionReport:
    route: str
    omega: Ext1Class
    ses: ShortExactSequence | None
    certificate: Splitting | NonSplitCertificate | None
    solution: Solution | None = None
    sequence_data: dict = field(default_factory=dict)

    @property
    def vanishes(self) -> bool:
        return self.omega.is_zero()

    @property
    def verdict(self) -> str:
        return "unobstructed" if self.vanishes else "obstructed"


def _pushout_sequence(S: DeformationSetup):
    L, incL = S.L
    # I ⊗ E0 -> L
    i_rows = []
    for r in S.IE0_to_E.matrix:
        x = incL.lift(r)
        assert x is not None
        i_rows.append(x)
    i = ModuleHom(S.IE0, L, i_rows)
    po = pushout(i, S.v)
    M = po.module
    if not M.annihilated_by(S.I_gens):
        raise AssertionError("pushout is not killed by I")
    M0 = M.over(S.B0)
    # L -> N0
    p_rows = []
    for l in incL.matrix:
        x = S.N0_incl.lift(S.E_to_E0.apply_coeffs(l))
        assert x is not None
        p_rows.append(x)
    LtoN0 = ModuleHom(L, S.N0, p_rows)
    P = S.P
    rows = [[P.zero] * S.N0.ngens for _ in range(S.K.ngens)] + list(LtoN0.matrix)
    MtoN0 = ModuleHom(M0, S.N0, rows)
    kappa = ModuleHom(S.K, M0, po.from_k.matrix)
    from_l = ModuleHom(L, M0, po.from_l.matrix)
    return ShortExactSequence(kappa, MtoN0), i, from_l, LtoN0


def elementary_obstruction(S: DeformationSetup) -> ObstructionReport:
    ses, i, from_l, LtoN0 = _pushout_sequence(S)
    cert = splitting_test(ses, S.ext_ctx)
    omega = cert.ext_class if isinstance(cert, NonSplitCertificate) else class_of(ses, S.ext_ctx)
    rep = ObstructionReport("elementary", omega, ses, cert,
                            sequence_data={"i": i, "from_l": from_l, "L_to_N0": LtoN0})
    if isinstance(cert, Splitting):
        rep.solution = solution_from_splitting(S, cert, rep)
    return rep


def solution_from_splitting(S: DeformationSetup, sp: Splitting, rep: ObstructionReport | None = None) -> Solution:
    """Push the sequence defining L out along the retraction determined by
    the splitting: ``F = K ⊕_L E``."""
    rep = rep or elementary_obstruction(S)
    ses = rep.ses
    L, incL = S.L
    from_l = rep.sequence_data["from_l"]
    LtoN0 = rep.sequence_data["L_to_N0"]
    # s(l) = -kappa^{-1}(sigma(p(l)) - [0, l])
    rows = []
    for j, l in enumerate(incL.matrix):
        unit = [S.P.one if k == j else S.P.zero for k in range(L.ngens)]
        sig = sp.section.apply_coeffs(LtoN0.apply_coeffs(unit))
        diff = [a - b for a, b in zip(sig, from_l.apply_coeffs(unit))]
        k = ses.i.lift(diff)
        assert k is not None
        rows.append([-a for a in k])
    s = ModuleHom(L, S.K, rows)
    return solution_from_retraction(S, s)


def solution_from_retraction(S: DeformationSetup, s: ModuleHom) -> Solution:
    L, incL = S.L
    po = pushout(incL, s)
    F = po.module
    P = S.P
    rows = [[P.zero] * S.F0.ngens for _ in range(S.K.ngens)] + list(S.f0.matrix)
    proj = ModuleHom(F, S.F0, rows)
    sol = Solution(S, F, po.from_k, proj, po.from_l)
    return sol


def splitting_from_solution(S: DeformationSetup, sol: Solution, rep: ObstructionReport | None = None) -> Splitting:
    """``n |-> [-f(n̄), n̄]`` for any lift n̄ in L of n."""
    rep = rep or elementary_obstruction(S)
    ses = rep.ses
    L, incL = S.L
    s = sol.retraction
    LtoN0 = rep.sequence_data["L_to_N0"]
    from_l = rep.sequence_data["from_l"]
    rows = []
    for n in range(S.N0.ngens):
        unit = [S.P.one if k == n else S.P.zero for k in range(S.N0.ngens)]
        lbar = LtoN0.lift(unit)
        assert lbar is not None
        val = [b - a for a, b in zip(ses.i.apply_coeffs(s.apply_coeffs(lbar)), from_l.apply_coeffs(lbar))]
        rows.append(val)
    sp = Splitting(ses, ModuleHom(S.N0, ses.middle, rows))
    assert sp.verify()
    return sp


def torsor_difference(S: DeformationSetup, sol: Solution, base: Solution) -> ModuleHom:
    """The map N0 -> K classifying ``sol`` against ``base``: a lift n̄ of n
    in ker(sol.f) is sent to ``base.f(n̄)``, which lies in K."""
    L, incL = S.L
    LtoN0 = _l_to_n0(S)
    rows = []
    diff = base.retraction - sol.retraction
    for n in range(S.N0.ngens):
        unit = [S.P.one if k == n else S.P.zero for k in range(S.N0.ngens)]
        lbar = LtoN0.lift(unit)
        rows.append(diff.apply_coeffs(lbar))
    return ModuleHom(S.N0, S.K, rows)


def torsor_action(S: DeformationSetup, sol: Solution, h: ModuleHom) -> Solution:
    """The solution whose difference against ``sol`` is h."""
    s = sol.retraction - (h @ _l_to_n0(S))
    return solution_from_retraction(S, s)


def _l_to_n0(S: DeformationSetup) -> ModuleHom:
    cache = S.__dict__.setdefault("_l_to_n0", None)
    if cache is None:
        L, incL = S.L
        rows = [S.N0_incl.lift(S.E_to_E0.apply_coeffs(l)) for l in incL.matrix]
        cache = ModuleHom(L, S.N0, rows)
        S.__dict__["_l_to_n0"] = cache
    return cache


def basepoint_zero_u0(S: DeformationSetup) -> Solution:
    """For u0 = 0: push 0 -> N0 -> E0 -> F0 -> 0 out along the zero map, i.e.
    F = K ⊕ F0 and f = (0, f0)."""
    from ..fpmod.ops import direct_sum
    ds = direct_sum([S.K, S.F0], ring=S.B)
    P = S.P
    rows = [[P.zero] * S.K.ngens + list(r) for r in S.f0.matrix]
    f = ModuleHom(S.E, ds.module, rows)
    return Solution(S, ds.module, ds.injections[0], ds.projections[1], f)


def h0_ra(S: DeformationSetup) -> ModuleHom:
    """``N0 -> Ω_{B1/A} ⊗ F0``, ``b1 ⊗ e |-> db1 ⊗ f0(1 ⊗ e)``."""
    return h0_beta_formula(S.omega_rel, S.f0, S.N0, S.N0_incl)


@dataclass
class AtiyahData:
    conormal_F0: ShortExactSequence
    e_class: Ext1Class
    ra: ModuleHom


def conormal_tensor_F0(S: DeformationSetup) -> ShortExactSequence:
    cd = S.conormal
    if not cd.left_exact:
        raise RouteUnavailable("route unavailable, use elementary_obstruction: conormal map not injective")
    I0 = S.I
    Om_p = base_change(cd.omega_p_B1, S.incl1)
    Om = base_change(cd.omega.module, S.incl1)
    delta = base_change_hom(cd.delta, S.incl1, I0, Om_p)
    proj = base_change_hom(cd.proj, S.incl1, Om_p, Om)
    idF = identity_hom(S.F0)
    A = S.IF0
    X = tensor(Om_p, S.F0)
    C = tensor(Om, S.F0)
    d = tensor_hom(delta, idF, A, X)
    p = tensor_hom(proj, idF, X, C)
    if not is_injective(d):
        raise RouteUnavailable("route unavailable, use elementary_obstruction: conormal sequence not exact after tensoring with F0")
    return ShortExactSequence(d, p)


def atiyah_obstruction(S: DeformationSetup) -> ObstructionReport:
    ses = conormal_tensor_F0(S)
    e = class_of(ses, ring=S.B0)
    ra = h0_ra(S)
    if ra.target.ngens != ses.quotient.ngens:
        raise AssertionError("presentations of Ω ⊗ F0 disagree")
    from ..homext import ExtContext
    mid = ExtContext(S.N0, S.IF0, S.B0)
    pulled = pullback_class(e, ModuleHom(S.N0, ses.quotient, ra.matrix), mid)
    omega = pushout_class(pulled, S.u0, S.ext_ctx)
    rep = ObstructionReport("atiyah", omega, None, None)
    rep.sequence_data = {"conormal_F0": ses, "e_class": e, "ra": ra}
    return rep


def route_equivalence(S: DeformationSetup) -> bool:
    """The difference of the two obstruction classes splits."""
    a = elementary_obstruction(S).omega
    b = atiyah_obstruction(S).omega
    return (a - b).is_zero()
