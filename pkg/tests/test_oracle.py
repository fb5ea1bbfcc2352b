import numpy as np
import pytest
from hypothesis import given, strategies as st

from quotdeform.deform import elementary_obstruction
from quotdeform.deform import oracle as O
from quotdeform.fpmod import present
from quotdeform.homext import ext1
from quotdeform.linalg import rank
from quotdeform.poly import GF
from builders import node, node_first_order, qring
from oracles import action_table, finite_module, free_and_transitive, vec_mod_p


@given(st.integers(1, 4), st.integers(1, 5), st.sampled_from([2, 3, 5]), st.data())
def test_rank_matches_exact_linear_algebra(r, c, p, data):
    rows = data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r))
    assert O.rank_mod(np.array(rows, dtype=np.int64), p) == rank(GF(p), rows)


@given(st.integers(1, 4), st.sampled_from([2, 3]), st.data())
def test_nullspace_and_solve(n, p, data):
    rows = data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=n, max_size=n), min_size=1, max_size=3))
    A = np.array(rows, dtype=np.int64)
    N = O.nullspace_mod(A, p)
    assert not ((A @ N.T) % p).any()
    assert N.shape[0] == n - O.rank_mod(A, p)
    x = data.draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n))
    b = (A @ np.array(x)) % p
    y = O.solve_mod(A, b, p)
    assert y is not None and not (((A @ y) - b) % p).any()


def test_all_vectors_order():
    V = O.all_vectors(2, 3)
    assert V.tolist()[:3] == [[0, 0, 0], [0, 0, 1], [0, 1, 0]] and len(V) == 8
    assert O.all_vectors(3, 2, 4, 6).tolist() == [[1, 1], [1, 2]]


def test_cap_override(monkeypatch):
    monkeypatch.setenv("QD_CAP", "17")
    assert O.candidate_cap(5) == 17
    monkeypatch.delenv("QD_CAP")
    assert O.candidate_cap(5) == 5 and O.candidate_cap(None) == 2 ** 24


@pytest.mark.parametrize("names,ideal,gens,rels", [
    (["t"], ["t^3"], 1, []),
    (["x", "y"], ["x*y"], 1, [["x^2"], ["y^3"]]),
    (["x", "y"], [], 2, [["x", "0"], ["y", "x"], ["0", "y^2"]]),
])
def test_finite_module_dimension(names, ideal, gens, rels):
    M = present(qring(GF(3), names, ideal), gens, rels)
    assert finite_module(M, 3).dim == M.k_dimension()


EXT_CASES = [
    (["t"], ["t^2"], [["t"]], 1, [["t"]], 1),
    (["x", "y"], [], [["x"], ["y"]], 1, [["x"], ["y"]], 1),
    (["x", "y"], ["x*y"], [["x"], ["y"]], 1, [["x"], ["y"]], 1),
    (["t"], ["t^3"], [["t"]], 1, [["t^2"]], 1),
    (["t"], [], [["t^2"]], 1, [["t^2"]], 1),
    (["t"], [], [["t^2"]], 1, [["t^3"]], 1),
    (["x", "y"], [], [["x"], ["y"]], 1, [["x^2"], ["y"]], 1),
    (["x", "y"], ["x^2", "y^2"], [["x"], ["y"]], 1, [], 1),
]


@pytest.mark.parametrize("names,ideal,Arels,An,Crels,Cn", EXT_CASES)
def test_ext_by_extension_enumeration(names, ideal, Arels, An, Crels, Cn):
    p = 2
    B = qring(GF(p), names, ideal)
    A, C = present(B, An, Arels), present(B, Cn, Crels)
    rg = [O.poly_dict(h, p) for h in B.ideal.basis]
    en = O.ext1_enumeration(p, B.nvars, rg, finite_module(A, p), finite_module(C, p))
    assert en.dimension == ext1(C, A, B).dimension()


def test_node_betti_matches_ext():
    S = node(GF(2), 1, 0)
    p = 2
    gens = [O.col_vec([S.P("x - e")], p), O.col_vec([S.P("y")], p)]
    betti = O.graded_first_betti(p, S.P.nvars, [O.poly_dict(h, p) for h in S.B0.ideal.basis], 1, gens, 7)
    assert betti == {2: 2}


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("ab,count", [((1, 1), 0), ((1, 0), None), ((0, 1), None), ((0, 0), None)])
def test_node_block_oracle_matches_obstruction(p, ab, count):
    S = node(GF(p), *ab)
    rep = elementary_obstruction(S)
    en = O.BlockLiftOracle(O.lift_data_from_setup(S)).enumerate()
    if count == 0:
        assert not rep.vanishes and en.count == 0
    else:
        assert rep.vanishes and en.count == p ** S.hom_group.k_dimension()


def test_flat_oracle_agrees_on_node():
    p = 2
    for ab in [(1, 1), (1, 0)]:
        S = node(GF(p), *ab)
        n0 = [O.col_vec([S.P(f"x - {ab[0]}*e")], p), O.col_vec([S.P(f"y - {ab[1]}*e")], p)]
        fo = O.FlatLiftOracle(p, S.P.nvars, [O.poly_dict(h, p) for h in S.B.ideal.basis], 1, [], n0,
                              [O.poly_dict(g, p) for g in S.I_gens], 6)
        block = O.BlockLiftOracle(O.lift_data_from_setup(S)).enumerate()
        assert len(fo.enumerate()) == block.count


def test_action_table_on_tangent():
    S = node_first_order(GF(2))
    base = elementary_obstruction(S).solution
    en, sigs, table = action_table(S, base)
    assert set(sigs) == set(en.solutions) and len(sigs) == en.count == 4
    assert free_and_transitive(table, len(sigs))


def test_oracle_rejects_rationals():
    with pytest.raises(O.OracleError):
        O.lift_data_from_setup(node())


def test_vec_mod_p():
    from fractions import Fraction
    assert vec_mod_p({(0, (1,)): Fraction(1, 2)}, 3) == {(0, (1,)): 2}
