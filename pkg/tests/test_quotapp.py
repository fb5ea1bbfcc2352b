import pytest
from hypothesis import given, strategies as st

from quotdeform.fpmod import ModuleHom, free_module, hom_module, present, tensor, tensor_hom, identity_hom
from quotdeform.deform import build_setup, elementary_obstruction, flat_problem
from quotdeform.deform.oracle import BlockLiftOracle, lift_data_from_setup
from quotdeform.poly import GF, QQ
from quotdeform.quotapp import (NotFlat, QuotPoint, betabar, betabar_hom, ext_injectivity_probe,
                                first_order_problem, perfect_check, pushforward, section_solution_check,
                                standard_battery, tangent)
from builders import (PLANE_MONOMIAL_IDEALS, dual_numbers, hilb1_constant, hilb1_universal, hilb_line_point,
                      node_point, plane_point, qring)
from oracles import brute_hom_dim


class TestTangent:
    @pytest.mark.parametrize("n", range(1, 6))
    def test_hilb_line(self, n):
        pt = hilb_line_point(QQ, n)
        rep = tangent(pt)
        assert rep.finite and rep.dimension == n
        IF0 = tensor(pt.over_B0(pt.residue_field()), pt.F0)
        assert brute_hom_dim(pt.N0, IF0, 101) == n

    def test_plane_colength_two(self):
        assert tangent(plane_point(QQ, ["x", "y^2"])).dimension == 4

    def test_node(self):
        assert tangent(node_point(QQ)).dimension == 2

    def test_infinite(self):
        rep = tangent(hilb1_universal(QQ), FPModule_free := free_module(qring(QQ, ["u"]), 1))
        assert not rep.finite and rep.dimension is None


class TestBetabar:
    def test_zero_module(self):
        pt = hilb1_universal(QQ)
        rep = betabar(pt, present(pt.B1, 0, []), "0")
        assert rep.source_dim == rep.target_dim == 0 and rep.isomorphism

    def test_universal_family_residue_field(self):
        pt = hilb1_universal(QQ)
        k = pt.residue_field()
        rep = betabar(pt, k, "k")
        assert rep.matrix == [[-1]] or rep.matrix == [[1]]
        assert rep.rank == 1 and rep.isomorphism
        # du |-> 1 goes to t - u |-> -1 (x) f0(1)
        g = ModuleHom(pt.omega_B1.module, k, [["1"]])
        h = betabar_hom(pt, k, g)
        gen = pt.N0_incl.matrix[0][0]
        sign = 1 if gen == pt.P.parse("t - u") else -1
        assert [str(c) for c in h.matrix[0]] == [str(-sign)]

    def test_constant_family_not_iso(self):
        rep = betabar(hilb1_constant(QQ), hilb1_constant(QQ).residue_field(), "k")
        assert rep.rank == 0 and not rep.surjective

    def test_module_level_free(self):
        pt = hilb1_universal(QQ)
        rep = betabar(pt, free_module(pt.B1, 1), "B1")
        assert rep.level == "module" and rep.isomorphism


GF3 = GF(3)
PT3 = hilb1_universal(GF3)
I3 = present(PT3.B1, 1, [["u^3"]])
H3 = hom_module(PT3.omega_B1.module, I3)
BASIS3 = H3.basis_homs()


def homs3():
    return st.lists(st.integers(0, 2), min_size=len(BASIS3), max_size=len(BASIS3)).map(
        lambda cs: sum((b.scale(c) for b, c in zip(BASIS3[1:], cs[1:])), BASIS3[0].scale(cs[0])))


@given(homs3(), homs3(), st.integers(0, 2))
def test_betabar_linear(g1, g2, c):
    b = lambda g: betabar_hom(PT3, I3, g)
    assert b(g1 + g2) == b(g1) + b(g2)
    assert b(g1.scale(c)) == b(g1).scale(c)


@given(homs3(), st.integers(0, 2), st.integers(0, 2))
def test_betabar_natural(g, a, c):
    """For phi : I -> I' (multiplication by a + c u into I' = I / u^2) the square commutes."""
    I2 = present(PT3.B1, 1, [["u^2"]])
    P1 = PT3.B1.ambient
    phi = ModuleHom(I3, I2, [[P1(a) + P1(c) * P1.parse("u")]])
    left = betabar_hom(PT3, I2, phi @ g)
    I3_0, I2_0 = PT3.over_B0(I3), PT3.over_B0(I2)
    phi0 = ModuleHom(I3_0, I2_0, [[PT3.incl1.apply_ambient(x) for x in r] for r in phi.matrix])
    phiF = tensor_hom(phi0, identity_hom(PT3.F0), tensor(I3_0, PT3.F0), tensor(I2_0, PT3.F0))
    right = phiF @ betabar_hom(PT3, I3, g)
    assert left == right


class TestPerfect:
    def test_universal_family_over_f2(self):
        pt = hilb1_universal(GF(2))
        chk = section_solution_check(pt, pt.residue_field())
        assert (chk.sections, chk.solutions, chk.bijective) == (2, 2, True)
        assert betabar(pt, pt.residue_field()).isomorphism

    def test_trivial_family_over_point(self):
        pt = hilb_line_point(GF(2), 1)
        rep = perfect_check(pt, [("k", pt.residue_field())])
        e = rep.entries[0]
        assert e.enumeration.sections == 1 and e.enumeration.solutions == 2
        assert not rep.perfect and rep.consistent

    def test_zero_u0_probe(self):
        F = GF(2)
        B1, B1p = dual_numbers(F, order=1)
        B2 = qring(F, ["t"])
        S0 = flat_problem(B1, B1p, B2, free_module(B2, 1), n0=[["t"]])
        S = build_setup(B1, B1p, B2, free_module(B2, 1), n0=[["t"]], K=S0.IF0, u0="zero")
        en = BlockLiftOracle(lift_data_from_setup(S)).enumerate()
        assert en.count == 2 ** S.hom_group.k_dimension()

    def test_battery_shape(self):
        names = [n for n, _ in standard_battery(qring(QQ, ["u"]))]
        assert names[0] == "k" and "B1" in names and "B1^2" in names

    def test_not_flat_point(self):
        with pytest.raises(NotFlat):
            QuotPoint(qring(QQ, ["u"]), qring(QQ, ["t"]), free_module(qring(QQ, ["t"]), 1), [["u"]])


class TestPushforward:
    def test_universal_family_F0(self):
        pt = hilb1_universal(QQ)
        pf = pushforward(pt.F0, pt.B1)
        # k[u,t]/(t-u) is free of rank one over k[u]
        assert pf.module.ngens == 1 and not pf.module.rels


class TestExtProbe:
    def test_zero_module(self):
        pt = hilb1_universal(QQ)
        assert ext_injectivity_probe(pt, present(pt.B1, 0, [])).injective

    def test_smooth_family(self):
        pt = hilb1_universal(QQ)
        rep = ext_injectivity_probe(pt, pt.residue_field())
        assert rep.source_dim == 0 and rep.target_dim == 0 and rep.injective

    def test_node_base_runs(self):
        B1 = qring(QQ, ["x", "y"], ["x*y"])
        B2 = qring(QQ, ["t"])
        pt = QuotPoint(B1, B2, free_module(B2, 1), [["t - x"]])
        rep = ext_injectivity_probe(pt, pt.residue_field())
        assert rep.source_dim >= 0  # recorded, not asserted
