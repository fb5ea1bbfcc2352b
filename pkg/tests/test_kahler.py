import random

import pytest
from hypothesis import given, strategies as st

from quotdeform.deform import h0_ra
from quotdeform.deform.sections import trivial_extension
from quotdeform.fpmod import ModuleHom, free_module, kernel, present, quotient_module, submodule
from quotdeform.homext import class_of, splitting_test, Splitting
from quotdeform.kahler import NotSquareZero, conormal, h0_beta, h0_beta_formula, kahler, principal_parts
from quotdeform.linalg import rank
from quotdeform.poly import GF, QQ, coproduct_ring
from builders import node, qring
from strategies import polynomials


class TestKahler:
    def test_plane_is_free(self):
        K = kahler(qring(QQ, ["x", "y"]))
        assert K.free_rank() == 2 and K.module.ngens == 2

    def test_truncated_line(self):
        K = kahler(qring(QQ, ["e"], ["e^3"]))
        assert [str(c) for c in K.module.rels[0]] == ["3*e^2"]
        assert K.module.k_dimension() == 2

    def test_node_torsion_by_linear_algebra(self):
        B = qring(QQ, ["x", "y"], ["x*y"])
        K = kahler(B).module
        P = B.ambient
        assert [str(c) for c in K.rels[0]] == ["y", "x"]
        # the span of the terms of degree <= 3 and the map w -> (x w, y w) on it
        mons = [(a, 0) for a in range(4)] + [(0, b) for b in range(1, 4)]
        elems = []
        for j in range(2):
            for e in mons:
                c = [P.zero, P.zero]
                c[j] = P.monomial(e)
                elems.append(K.reduce(c))
        index: dict = {}

        def coords(parts):
            out = {}
            for off, v in enumerate(parts):
                for j, f in enumerate(v):
                    for e, c in f.coeffs.items():
                        out[index.setdefault((off, j, e), len(index))] = c
            return out

        src = [coords([v]) for v in elems]
        img = [coords([K.reduce([P.var("x") * c for c in v]), K.reduce([P.var("y") * c for c in v])])
               for v in elems]
        n = len(index)
        dense = lambda rows: [[r.get(i, 0) for i in range(n)] for r in rows]
        stacked = [a + b for a, b in zip(dense(src), dense(img))]
        # kernel dimension on the span = rank of (source | image) - rank of image
        assert rank(QQ, stacked) - rank(QQ, dense(img)) == 1

    def test_node_torsion_element(self):
        B = qring(QQ, ["x", "y"], ["x*y"])
        K = kahler(B).module
        P = B.ambient
        w = K.reduce([P.zero, P.parse("x")])
        assert any(w)
        assert not any(K.reduce([P.parse("x") * c for c in w]))
        assert not any(K.reduce([P.parse("y") * c for c in w]))


C = qring(QQ, ["u", "t"])
E = free_module(C, 1)
PP = principal_parts(C, ["u"], E, extended=True)
CP = C.ambient


class TestPrincipalParts:
    def test_unit_section(self):
        assert PP.s([CP.one]) == PP.P1.reduce([PP.PD.one])

    def test_exact(self):
        assert PP.verify_exact()


@given(polynomials(CP, max_terms=3, max_exp=2), polynomials(CP, max_terms=3, max_exp=2))
def test_defect_is_differential(c, e):
    lhs = [a - b for a, b in zip(PP.s([c * e]), PP.act(c, PP.s([e])))]
    assert PP.P1.reduce(lhs) == PP.include(PP.d_tensor(c, [e]))


@given(polynomials(CP, max_terms=3, max_exp=2), polynomials(CP, max_terms=3, max_exp=2))
def test_t_is_linear(cp, c):
    lhs = [a - b for a, b in zip(PP.t([cp * c]), PP.act(cp, PP.t([c])))]
    assert not any(PP.P1.reduce(lhs))


class TestH0Beta:
    def test_zero_kernel(self):
        f = ModuleHom(E, E, [["1"]])
        h = h0_beta(PP, f)
        assert h.is_zero()

    def test_universal_point_family(self):
        F0, f = quotient_module(E, [["t - u"]])
        N, inc = submodule(E, [["t - u"]])
        via_st = h0_beta(PP, f, N, inc)
        closed = h0_beta_formula(PP.omega, f, N, inc)
        assert via_st == closed
        assert [str(c) for c in closed.matrix[0]] == ["-1"]

    @pytest.mark.parametrize("a,b", [(1, 1), (1, 0), (2, 3)])
    def test_node_family(self, a, b):
        S = node(QQ, a, b)
        pp = principal_parts(S.B0, ["e"], S.E0, extended=True)
        assert h0_beta(pp, S.f0, S.N0, S.N0_incl).matrix == h0_ra(S).matrix
        N, inc = submodule(S.E0, [[f"x - {a}*e"], [f"y - {b}*e"]])
        closed = h0_beta_formula(S.omega_rel, S.f0, N, inc)
        assert h0_beta(pp, S.f0, N, inc) == closed
        assert [str(r[0]) for r in closed.matrix] == [str(-a) if a else "0", str(-b) if b else "0"]


def test_node_h0_beta_randomized():
    rng = random.Random(5)
    S = node(QQ, 1, 1)
    pp = principal_parts(S.B0, ["e"], S.E0, extended=True)
    P = S.P
    for _ in range(20):
        c = P.from_dict({(rng.randrange(2), rng.randrange(3), rng.randrange(3)): rng.randint(-3, 3)})
        m = P.from_dict({(0, rng.randrange(3), rng.randrange(3)): rng.randint(-3, 3)})
        lhs = pp.P1.reduce([x - y for x, y in zip(pp.s([c * m]), pp.act(c, pp.s([m])))])
        assert lhs == pp.include(pp.d_tensor(c, [m]))


class TestConormal:
    def test_trivial_extension_splits(self):
        B1 = qring(QQ, ["u"])
        B1s, B1p = trivial_extension(B1, present(B1, 1, []))
        cd = conormal(B1p, B1s)
        assert cd.left_exact
        assert isinstance(splitting_test(cd.sequence()), Splitting)

    def test_truncated_line(self):
        B1, B1p = qring(QQ, ["e"], ["e^2"]), qring(QQ, ["e"], ["e^3"])
        cd = conormal(B1p, B1)
        assert cd.left_exact
        assert [str(c) for c in cd.delta.matrix[0]] == ["2*e"]
        assert cd.q.source.k_dimension() == 2 and cd.I1.k_dimension() == 1

    def test_char_two_flag(self):
        # d(u) survives since the relation d(u^2) = 2u du vanishes in char 2
        cd = conormal(qring(GF(2), ["u"], ["u^2"]), qring(GF(2), ["u"], ["u"]))
        assert cd.left_exact is True

    def test_not_square_zero(self):
        with pytest.raises(NotSquareZero):
            conormal(qring(QQ, ["e"], ["e^5"]), qring(QQ, ["e"], ["e^2"]))
