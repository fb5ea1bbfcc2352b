import itertools
import random

import pytest
from hypothesis import given, strategies as st

from quotdeform.fpmod import (ModuleHom, direct_sum, free_module, identity_hom, is_exact, is_injective, is_surjective,
                              present, zero_hom)
from quotdeform.homext import (NonSplitCertificate, NotExact, ShortExactSequence, Splitting, baer_sum,
                               class_of, ext1, pullback, pullback_class, pullback_ses, pushout, pushout_class,
                               pushout_ses, realize, splitting_test)
from quotdeform.deform import elementary_obstruction
from quotdeform.poly import GF, QQ
from builders import node, qring

Tt2 = qring(QQ, ["t"], ["t^2"])
k = present(Tt2, 1, [["t"]])
D = present(Tt2, 1, [])


def nonsplit():
    """0 -> k --t--> k[t]/(t^2) --> k -> 0."""
    return ShortExactSequence(ModuleHom(k, D, [["t"]]), ModuleHom(D, k, [["1"]]))


def split():
    X = present(Tt2, 2, [["t", "0"], ["0", "t"]])
    return ShortExactSequence(ModuleHom(k, X, [["1", "0"]]), ModuleHom(X, k, [["0"], ["1"]]))


class TestPushoutPullback:
    def test_along_identity(self):
        i = ModuleHom(k, D, [["t"]])
        po = pushout(i, identity_hom(k))
        assert is_exact(i, ModuleHom(D, k, [["1"]]))
        assert po.module.k_dimension() == D.k_dimension()

    def test_along_zero(self):
        i = ModuleHom(k, D, [["t"]])
        po = pushout(i, zero_hom(k, k))
        # K plus the cokernel of i
        assert po.module.k_dimension() == 2 and is_injective(po.from_k)

    def test_pullback_along_identity(self):
        p = ModuleHom(D, k, [["1"]])
        pb = pullback(p, identity_hom(k))
        assert pb.module.k_dimension() == D.k_dimension()

    def test_pullback_along_zero_is_kernel(self):
        p = ModuleHom(D, k, [["1"]])
        pb = pullback(p, zero_hom(free_module(Tt2, 0), k))
        assert pb.module.k_dimension() == 1

    def test_node_pushout_is_killed_by_I(self):
        S = node(QQ, 1, 1)
        M = elementary_obstruction(S).ses.middle
        assert M.annihilated_by(S.I_gens)


class TestExt:
    def test_free_source(self):
        assert ext1(free_module(Tt2, 2), k).dimension() == 0

    def test_residue_field_of_dual_numbers(self):
        assert ext1(k, k).dimension() == 1

    def test_node_obstruction_group(self):
        S = node(GF(2), 1, 1)
        assert S.ext_ctx.dimension() == 2


class TestClasses:
    def test_split_class_is_zero(self):
        assert class_of(split()).is_zero()
        assert isinstance(splitting_test(split()), Splitting)

    def test_nonsplit(self):
        c = class_of(nonsplit())
        assert not c.is_zero()
        cert = splitting_test(nonsplit())
        assert isinstance(cert, NonSplitCertificate) and cert.verify()

    def test_self_difference(self):
        c = class_of(nonsplit())
        assert (c - c).is_zero()
        assert baer_sum(c, c.ctx.zero()) == c
        assert baer_sum(c, -c).is_zero()

    def test_realize_roundtrip(self):
        c = class_of(nonsplit())
        assert class_of(realize(c), c.ctx) == c

    def test_node_splitting_matches_product(self):
        for a, b in [(1, 1), (1, 0), (0, 1)]:
            cert = splitting_test(elementary_obstruction(node(QQ, a, b)).ses)
            assert isinstance(cert, Splitting) == (a * b == 0)
            assert cert.verify()

    def test_not_exact(self):
        with pytest.raises(NotExact):
            ShortExactSequence(ModuleHom(k, D, [["t"]]), ModuleHom(D, k, [["t"]]))


# classes over k[t]/(t^3) with C = k[t]/(t^2) and A = k plus k[t]/(t^2)
R3 = qring(GF(3), ["t"], ["t^3"])
A3 = present(R3, 2, [["t", "0"], ["0", "t^2"]])
C3 = present(R3, 1, [["t^2"]])
CTX = ext1(C3, A3)
BASIS = CTX.basis()


def classes():
    return st.lists(st.integers(0, 2), min_size=len(BASIS), max_size=len(BASIS)).map(
        lambda cs: sum((b.scale(c) for b, c in zip(BASIS, cs)), CTX.zero()))


def test_context_is_nontrivial():
    assert len(BASIS) >= 2


@given(classes(), classes(), classes())
def test_baer_group_laws(a, b, c):
    assert baer_sum(a, b) == baer_sum(b, a)
    assert baer_sum(baer_sum(a, b), c) == baer_sum(a, baer_sum(b, c))
    assert baer_sum(a, CTX.zero()) == a
    assert baer_sum(a, -a).is_zero()


@given(classes(), classes())
def test_realized_sequences_recover_classes(a, b):
    ses = realize(a)
    assert class_of(ses, CTX) == a
    assert class_of(ses, CTX).is_zero() == isinstance(splitting_test(ses, CTX), Splitting)
    assert class_of(realize(baer_sum(a, b)), CTX) == a + b


@given(classes(), st.integers(0, 2), st.integers(0, 2))
def test_pushout_and_pullback_naturality(a, u, v):
    P = R3.ambient
    g = ModuleHom(A3, A3, [[P(u), P.zero], [P.zero, P(v)]])
    ses = realize(a)
    assert class_of(pushout_ses(ses, g), CTX) == pushout_class(a, g, CTX)
    h = ModuleHom(C3, C3, [[P(u) + P.parse("t")]])
    assert class_of(pullback_ses(ses, h), CTX) == pullback_class(a, h, CTX)


def _all_homs(M, N):
    from quotdeform.fpmod import hom_module
    basis = hom_module(M, N).basis_homs()
    out = []
    for cs in itertools.product(range(3), repeat=len(basis)):
        h = zero_hom(M, N)
        for c, b in zip(cs, basis):
            h = h + b.scale(c)
        out.append(h)
    return out


def _random_cone_pairs(i, u, T, rng, n):
    """Pairs (h : target of i -> T, g : target of u -> T) with h∘i = g∘u."""
    hs, gs = _all_homs(i.target, T), _all_homs(u.target, T)
    hi = [h @ i for h in hs]
    out = []
    while len(out) < n:
        g = gs[rng.randrange(len(gs))]
        gu = g @ u
        match = [h for h, c in zip(hs, hi) if c == gu]
        if match:
            out.append((match[rng.randrange(len(match))], g))
    return out


def test_pushout_universal_property_spot_checks():
    rng = random.Random(3)
    P = R3.ambient
    S_ = present(R3, 1, [["t^2"]])
    L = present(R3, 1, [])
    K = A3
    i = ModuleHom(S_, L, [["t"]])
    u = ModuleHom(S_, K, [["0", "t"]])
    po = pushout(i, u)
    T = present(R3, 2, [["t^2", "0"]])
    joint = ModuleHom(direct_sum([K, L]).module, po.module, list(po.from_k.matrix) + list(po.from_l.matrix))
    assert is_surjective(joint)  # so an induced map is unique
    for h, g in _random_cone_pairs(i, u, T, rng, 10):
        tau = ModuleHom(po.module, T, list(g.matrix) + list(h.matrix))
        assert (tau @ po.from_k) == g and (tau @ po.from_l) == h


def test_pullback_universal_property_spot_checks():
    rng = random.Random(4)
    E = present(R3, 1, [])
    X = A3
    Q = C3
    p = ModuleHom(E, Q, [["1"]])
    q = ModuleHom(X, Q, [["0"], ["t"]])
    pb = pullback(p, q)
    inc = ModuleHom(pb.module, direct_sum([E, X]).module,
                    [list(a) + list(b) for a, b in zip(pb.to_e.matrix, pb.to_x.matrix)])
    assert is_injective(inc)  # so an induced map is unique
    W = present(R3, 2, [["t", "0"]])
    homs_e, homs_x = _all_homs(W, E), _all_homs(W, X)
    cones = [(a, b) for a in homs_e for b in homs_x if (p @ a) == (q @ b)]
    for _ in range(10):
        a, b = cones[rng.randrange(len(cones))]
        rows = []
        for ra, rb in zip(a.matrix, b.matrix):
            x = inc.lift(list(ra) + list(rb))
            assert x is not None
            rows.append(x)
        tau = ModuleHom(W, pb.module, rows)
        assert (pb.to_e @ tau) == a and (pb.to_x @ tau) == b
