import pytest
from hypothesis import given, strategies as st

from quotdeform.fpmod import (FPModule, ModuleHom, NotWellDefined, cokernel, direct_sum, free_module,
                              hom_module, identity_hom, image, inverse_of_iso, is_exact, is_injective,
                              is_surjective, kernel, present, resolution_fragment, tensor, zero_hom)
from quotdeform.poly import GF, QQ, PolyRing, QuotientRing, StructuralError
from builders import node, qring
from oracles import brute_hom_dim, finite_module
from strategies import coefficients

T = qring(QQ, ["t"])
Tt2 = qring(QQ, ["t"], ["t^2"])


def test_present():
    M = present(T, 1, [["t^2"]])
    assert M.k_dimension() == 2
    Z = present(T, 0, [])
    assert Z.is_zero() and Z.k_dimension() == 0


def test_free_module_over_coproduct():
    B1p = qring(QQ, ["e", "t"], ["e^3"])
    E = present(B1p, 1, [])
    assert E.ngens == 1 and not E.rels and not E.is_finite()


def test_relation_length_checked():
    with pytest.raises(StructuralError):
        present(T, 2, [["t"]])


class TestHom:
    def test_identity(self):
        M = present(T, 2, [["t", "t^2"]])
        assert identity_hom(M).matrix == ((T.ambient.one, T.ambient.zero), (T.ambient.zero, T.ambient.one))

    def test_surjection_well_defined(self):
        f = ModuleHom(present(T, 1, [["t^2"]]), present(T, 1, [["t"]]), [["1"]])
        assert is_surjective(f)

    def test_rejects_ill_defined(self):
        with pytest.raises(NotWellDefined, match="maps to"):
            ModuleHom(present(T, 1, [["t"]]), present(T, 1, [["t^2"]]), [["1"]])


class TestKernelImageCokernel:
    def test_kernel_of_projection(self):
        f = ModuleHom(free_module(T, 1), present(T, 1, [["t^2"]]), [["1"]])
        K, inc = kernel(f)
        assert K.ngens == 1 and inc.matrix == ((T.ambient.parse("t^2"),),)
        assert is_injective(inc) and is_exact(inc, f)

    def test_kernel_of_identity(self):
        M = present(T, 1, [["t^3"]])
        K, inc = kernel(identity_hom(M))
        assert K.is_zero()

    def test_cokernel_of_multiplication(self):
        C, q = cokernel(ModuleHom(free_module(T, 1), free_module(T, 1), [["t"]]))
        assert C.k_dimension() == 1

    def test_image_of_zero(self):
        Im, _, _ = image(zero_hom(free_module(T, 2), free_module(T, 1)))
        assert Im.is_zero()

    def test_node_L_column_exact(self):
        S = node(QQ, 1, 1)
        L, inc = S.L
        c = ModuleHom(S.E, S.F0, S.f0.matrix)
        assert is_injective(inc) and is_exact(inc, c)

    def test_cokernel_of_N0_is_F0(self):
        S = node(QQ, 1, 0)
        C, q = cokernel(S.N0_incl)
        iso = ModuleHom(C, S.F0, S.f0.matrix)
        assert inverse_of_iso(iso) is not None


class TestTensor:
    def test_with_free(self):
        M = present(T, 1, [["t^2"]])
        assert tensor(M, free_module(T, 1)).k_dimension() == 2

    def test_truncated_polynomials(self):
        X = tensor(present(T, 1, [["t^2"]]), present(T, 1, [["t^3"]]))
        assert X.k_dimension() == 2

    def test_node_I_tensor_F0(self):
        S = node(QQ, 1, 1)
        X = S.IF0
        assert X.k_dimension() == finite_module(X, 101).dim == 1


class TestHomModule:
    def test_from_free(self):
        N = present(T, 1, [["t^3"]])
        assert hom_module(free_module(T, 1), N).k_dimension() == 3

    def test_ideal_into_truncation(self):
        M, _ = kernel(ModuleHom(free_module(T, 1), present(T, 1, [["t^2"]]), [["1"]]))
        N = present(T, 1, [["t^2"]])
        H = hom_module(M, N)
        assert H.k_dimension() == 2 == brute_hom_dim(M, N, 101)

    def test_node_tangent(self):
        B2 = qring(QQ, ["x", "y"], ["x*y"])
        M, _ = kernel(ModuleHom(free_module(B2, 1), present(B2, 1, [["x"], ["y"]]), [["1"]]))
        N = present(B2, 1, [["x"], ["y"]])
        assert hom_module(M, N).k_dimension() == 2 == brute_hom_dim(M, N, 101)

    def test_evaluation_is_bilinear(self):
        N = present(T, 1, [["t^3"]])
        H = hom_module(free_module(T, 1), N)
        h = [c for c in H.module.gens()[0].coeffs]
        m = (T.ambient.parse("t"),)
        assert H.evaluate(h, m) == N.reduce([T.ambient.parse("t") * H.evaluate(h, (T.ambient.one,))[0]])


class TestResolution:
    def test_free(self):
        R = resolution_fragment(free_module(T, 2))
        assert R.F1.ngens == 0 and R.verify()

    def test_residue_field_of_dual_numbers(self):
        k = present(Tt2, 1, [["t"]])
        R = resolution_fragment(k)
        assert R.F1.ngens == 1 and R.F2.ngens == 1
        assert str(R.d2.matrix[0][0]) == "t" and R.verify()

    def test_node_N0(self):
        S = node(QQ, 1, 1)
        assert resolution_fragment(S.N0).verify()


F3 = qring(GF(3), ["t"], ["t^3"])


@given(st.lists(coefficients(GF(3)), min_size=3, max_size=3), st.lists(coefficients(GF(3)), min_size=3, max_size=3))
def test_hom_sum_and_composition(a, b):
    M = present(F3, 1, [])
    P = F3.ambient
    f = ModuleHom(M, M, [[P.from_dict({(i,): c for i, c in enumerate(a)})]])
    g = ModuleHom(M, M, [[P.from_dict({(i,): c for i, c in enumerate(b)})]])
    x = (P.parse("1 + t"),)
    assert (f + g).apply_coeffs(x) == M.reduce([u + v for u, v in zip(f.apply_coeffs(x), g.apply_coeffs(x))])
    assert (f @ g).apply_coeffs(x) == f.apply_coeffs(g.apply_coeffs(x))


def test_direct_sum_injections():
    ds = direct_sum([present(T, 1, [["t"]]), present(T, 1, [["t^2"]])])
    assert ds.module.k_dimension() == 3 and all(is_injective(i) for i in ds.injections)
