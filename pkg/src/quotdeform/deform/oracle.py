"""Exhaustive enumeration over prime fields.

These counts are the independent check behind obstruction verdicts, solution
counts, tangent dimensions and Ext groups.  Everything here is linear algebra
mod p on truncated monomial spaces ``P^g / m^d P^g``.  Only polynomial
arithmetic is shared with the rest of the package; modules, extensions and
obstructions are rebuilt from raw presentations.

All modules handled here must be supported at the origin, so that a high
enough power of the maximal ideal of the ambient variables kills them.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..poly.ring import Polynomial, StructuralError

DEFAULT_CAP = 2 ** 24

Vec = dict  # {(pos, exps): int}


class CapExceeded(RuntimeError):
    """The search space is larger than the candidate cap."""


class OracleError(ValueError):
    pass


def candidate_cap(cap: int | None = None) -> int:
    """QD_CAP in the environment wins over the argument."""
    env = os.environ.get("QD_CAP")
    if env:
        return int(env)
    return DEFAULT_CAP if cap is None else int(cap)


# ---------------------------------------------------------------- linear algebra mod p

def rref_mod(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    M = np.array(M, dtype=np.int64) % p
    if M.ndim != 2 or M.size == 0:
        return M.reshape(0, M.shape[1] if M.ndim == 2 else 0), []
    rows, cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if not nz.size:
            continue
        i = r + nz[0]
        if i != r:
            M[[r, i]] = M[[i, r]]
        M[r] = (M[r] * pow(int(M[r, c]), -1, p)) % p
        col = M[:, c].copy()
        col[r] = 0
        nzr = np.flatnonzero(col)
        if nzr.size:
            M[nzr] = (M[nzr] - np.outer(col[nzr], M[r])) % p
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rank_mod(M: np.ndarray, p: int) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref_mod(M, p)[1])


def solve_mod(A: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Some x with ``A x = b`` mod p, or None."""
    A = np.asarray(A, dtype=np.int64) % p
    n = A.shape[1]
    aug = np.concatenate([A, np.asarray(b, dtype=np.int64).reshape(-1, 1) % p], axis=1)
    R, piv = rref_mod(aug, p)
    if n in piv:
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, c in zip(R, piv):
        x[c] = row[n]
    return x


def nullspace_mod(A: np.ndarray, p: int) -> np.ndarray:
    """Rows spanning ``{x : A x = 0}``."""
    A = np.asarray(A, dtype=np.int64) % p
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref_mod(A, p)
    free = [c for c in range(n) if c not in piv]
    out = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for row, c in zip(R, piv):
            out[k, c] = (-row[f]) % p
    return out


def all_vectors(p: int, n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows ``start..stop`` of the lexicographic list of F_p^n (last coordinate fastest)."""
    total = p ** n
    stop = total if stop is None else min(stop, total)
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.zeros((idx.size, n), dtype=np.int64)
    for c in range(n - 1, -1, -1):
        out[:, c] = idx % p
        idx = idx // p
    return out


# ---------------------------------------------------------------- raw data

def poly_dict(f: Polynomial, p: int) -> dict:
    if f.ring.field.characteristic != p:
        raise OracleError(f"oracle works over GF({p}); got coefficients in {f.ring.field}")
    return {e: int(c) % p for e, c in f.coeffs.items() if int(c) % p}


def col_vec(col: Sequence[Polynomial], p: int) -> Vec:
    v: Vec = {}
    for pos, f in enumerate(col):
        for e, c in poly_dict(f, p).items():
            v[(pos, e)] = c
    return v


def _add(e, f):
    return tuple(a + b for a, b in zip(e, f))


def monomials_below(nvars: int, d: int) -> list[tuple]:
    out = []
    for deg in range(d):
        for combo in itertools.combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


class Truncation:
    """Coordinates on ``P^g / m^d P^g`` (monomials of degree < d at each position)."""

    def __init__(self, nvars: int, g: int, d: int, p: int):
        self.nvars, self.g, self.d, self.p = nvars, g, d, p
        self.monos = monomials_below(nvars, d)
        self.terms = [(pos, e) for pos in range(g) for e in self.monos]
        self.index = {t: i for i, t in enumerate(self.terms)}
        self.dim = len(self.terms)

    def vector(self, v: Vec) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.int64)
        for t, c in v.items():
            i = self.index.get(t)
            if i is not None:
                out[i] = (out[i] + c) % self.p
        return out

    def shift(self, v: Vec, mu: tuple) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.int64)
        for (pos, e), c in v.items():
            i = self.index.get((pos, _add(e, mu)))
            if i is not None:
                out[i] = (out[i] + c) % self.p
        return out

    def multiples(self, vecs: Iterable[Vec]) -> np.ndarray:
        rows = []
        for v in vecs:
            if not v:
                continue
            low = min(sum(e) for _, e in v)
            for mu in self.monos:
                if sum(mu) + low >= self.d:
                    continue
                rows.append(self.shift(v, mu))
        if not rows:
            return np.zeros((0, self.dim), dtype=np.int64)
        return np.array(rows, dtype=np.int64)


def ideal_times_gens(ring_gens: Sequence[dict], g: int) -> list[Vec]:
    return [{(j, e): c for e, c in h.items()} for h in ring_gens for j in range(g)]


def mul_poly_vec(h: dict, v: Vec, p: int) -> Vec:
    out: Vec = {}
    for e1, c1 in h.items():
        for (pos, e2), c2 in v.items():
            t = (pos, _add(e1, e2))
            out[t] = (out.get(t, 0) + c1 * c2) % p
    return {t: c for t, c in out.items() if c}


def add_vecs(a: Vec, b: Vec, p: int, sign: int = 1) -> Vec:
    out = dict(a)
    for t, c in b.items():
        out[t] = (out.get(t, 0) + sign * c) % p
    return {t: c for t, c in out.items() if c}


class Reducer:
    """Reduction modulo the row space of a fixed matrix, with coordinates in the
    complement spanned by the non-pivot columns."""

    def __init__(self, rows: np.ndarray, dim: int, p: int):
        self.p = p
        if rows.size:
            self.R, self.piv = rref_mod(rows, p)
        else:
            self.R, self.piv = np.zeros((0, dim), dtype=np.int64), []
        ps = set(self.piv)
        self.free = np.array([c for c in range(dim) if c not in ps], dtype=np.int64)
        self.piv_arr = np.array(self.piv, dtype=np.int64)

    @property
    def quotient_dim(self) -> int:
        return int(self.free.size)

    def project(self, X: np.ndarray) -> np.ndarray:
        """Complement coordinates of each row of X (or of a single vector)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.int64)) % self.p
        if len(self.piv):
            X = (X - X[:, self.piv_arr] @ self.R) % self.p
        return X[:, self.free]


# ---------------------------------------------------------------- finite modules as k-spaces

class FiniteModule:
    """``P^g / rels`` over F_p as a vector space with the action of each variable.

    The truncation degree grows until the dimension is stable and exceeds it,
    which forces the maximal ideal to act nilpotently."""

    def __init__(self, p: int, nvars: int, g: int, rels: Sequence[Vec], max_degree: int = 40):
        self.p, self.nvars, self.g = p, nvars, g
        self.rels = [r for r in rels if r]
        prev = None
        d = 1
        while True:
            T = Truncation(nvars, g, d, p)
            red = Reducer(T.multiples(self.rels), T.dim, p)
            dim = red.quotient_dim
            if prev is not None and dim == prev and d > dim:
                break
            if d > max_degree:
                raise OracleError("module is not finite-dimensional at the origin within the degree bound")
            prev = dim
            d += 1
        self.d, self.T, self.red = d, T, red
        self.dim = dim
        self.basis_terms = [T.terms[c] for c in red.free]
        self.action = []
        for v in range(nvars):
            unit = tuple(1 if i == v else 0 for i in range(nvars))
            cols = [self.coords({(pos, _add(e, unit)): 1}) for pos, e in self.basis_terms]
            self.action.append(np.array(cols, dtype=np.int64).T.reshape(dim, dim) if dim else
                               np.zeros((0, 0), dtype=np.int64))
        self._pow: dict = {}

    def coords(self, v: Vec) -> np.ndarray:
        return self.red.project(self.T.vector(v))[0]

    def gen(self, j: int) -> np.ndarray:
        return self.coords({(j, (0,) * self.nvars): 1})

    def poly_matrix(self, h: dict) -> np.ndarray:
        return poly_on(h, self.action, self.p, self._pow)


def poly_on(h: dict, mats: Sequence[np.ndarray], p: int, cache: dict | None = None) -> np.ndarray:
    """h evaluated on commuting matrices."""
    n = mats[0].shape[0] if mats else 0
    out = np.zeros((n, n), dtype=np.int64)
    cache = {} if cache is None else cache
    for e, c in h.items():
        M = cache.get(e)
        if M is None:
            M = np.eye(n, dtype=np.int64)
            for i, k in enumerate(e):
                for _ in range(k):
                    M = (M @ mats[i]) % p
            cache[e] = M
        out = (out + c * M) % p
    return out


# ---------------------------------------------------------------- lifting problems by block matrices

@dataclass
class LiftData:
    """Raw data of a lifting problem over F_p, all on one ambient polynomial ring.

    ``ring_gens`` defines B; ``E_rels`` are the relations of E besides the ring
    ideal; F0 and K are given by relation vectors that already include the
    ideal of B0; ``f0_rows[j]`` is the image of the j-th generator of E in F0;
    ``u0_rows[a * m + l]`` is u0 of (I-generator a) ⊗ (F0-generator l)."""
    p: int
    nvars: int
    ring_gens: list
    g: int
    E_rels: list
    m: int
    F0_rels: list
    f0_rows: list
    r: int
    K_rels: list
    I_gens: list
    u0_rows: list


@dataclass
class LiftEnumeration:
    count: int
    hom_free_count: int
    mode: str
    candidates: int
    solutions: list = field(default_factory=list)


class BlockLiftOracle:
    """Solutions as B-module structures on K ⊕ F0, upper triangular in the
    action, with the images of the generators of E; counted up to the
    automorphisms ``[[1, φ], [0, 1]]``."""

    def __init__(self, data: LiftData):
        self.data = data
        p, n = data.p, data.nvars
        self.F0 = FiniteModule(p, n, data.m, data.F0_rels)
        self.K = FiniteModule(p, n, data.r, data.K_rels)
        self.dF, self.dK = self.F0.dim, self.K.dim
        self.nC = n * self.dK * self.dF
        self.N = self.nC + data.g * self.dK
        self.f0c = [self.F0.coords(v) for v in data.f0_rows]
        # u0(g_a ⊗ f0(e_j)) in K-coordinates
        self.target = {}
        for a in range(len(data.I_gens)):
            for j in range(data.g):
                val = np.zeros(self.dK, dtype=np.int64)
                for (l, e), c in data.f0_rows[j].items():
                    u = self.K.coords(data.u0_rows[a * data.m + l])
                    val = (val + c * self.K.poly_matrix({e: 1}) @ u) % p
                self.target[(a, j)] = val
        self._affine = None
        self._orbit = None

    def unpack(self, z: np.ndarray):
        dK, dF = self.dK, self.dF
        n = self.data.nvars
        C = [z[v * dK * dF:(v + 1) * dK * dF].reshape(dK, dF) for v in range(n)]
        kk = [z[self.nC + j * dK:self.nC + (j + 1) * dK] for j in range(self.data.g)]
        return C, kk

    def pack(self, C, kk) -> np.ndarray:
        parts = [np.asarray(c, dtype=np.int64).reshape(-1) for c in C] + [np.asarray(k, dtype=np.int64) for k in kk]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def matrices(self, C):
        dK, dF = self.dK, self.dF
        mats = []
        for v in range(self.data.nvars):
            X = np.zeros((dK + dF, dK + dF), dtype=np.int64)
            X[:dK, :dK] = self.K.action[v]
            X[dK:, dK:] = self.F0.action[v]
            X[:dK, dK:] = C[v]
            mats.append(X)
        return mats

    def residual(self, z: np.ndarray) -> np.ndarray:
        """All defining conditions, top blocks only (the rest hold automatically)."""
        d, p, dK = self.data, self.data.p, self.dK
        C, kk = self.unpack(np.asarray(z, dtype=np.int64) % p)
        X = self.matrices(C)
        cache: dict = {}
        out = []
        for v in range(d.nvars):
            for w in range(v + 1, d.nvars):
                out.append(((X[v] @ X[w] - X[w] @ X[v]) % p)[:dK, dK:].reshape(-1))
        for h in d.ring_gens:
            out.append(poly_on(h, X, p, cache)[:dK, dK:].reshape(-1))
        fj = [np.concatenate([kk[j], self.f0c[j]]) for j in range(d.g)]
        for r in d.E_rels:
            acc = np.zeros(dK + self.dF, dtype=np.int64)
            for (j, e), c in r.items():
                acc = (acc + c * poly_on({e: 1}, X, p, cache) @ fj[j]) % p
            out.append(acc[:dK])
        for a, ga in enumerate(d.I_gens):
            G = poly_on(ga, X, p, cache)
            for j in range(d.g):
                out.append(((G @ fj[j])[:dK] - self.target[(a, j)]) % p)
        return np.concatenate(out) % p if out else np.zeros(0, dtype=np.int64)

    def affine(self):
        """(M, b) with residual(z) = M z + b; the conditions are affine in z."""
        if self._affine is None:
            p = self.data.p
            b = self.residual(np.zeros(self.N, dtype=np.int64))
            cols = []
            for i in range(self.N):
                e = np.zeros(self.N, dtype=np.int64)
                e[i] = 1
                cols.append((self.residual(e) - b) % p)
            M = np.array(cols, dtype=np.int64).T if cols else np.zeros((b.size, 0), dtype=np.int64)
            self._affine = (M.reshape(b.size, self.N), b)
        return self._affine

    def surjective(self, z: np.ndarray) -> bool:
        p = self.data.p
        C, kk = self.unpack(z)
        X = self.matrices(C)
        span = [np.concatenate([kk[j], self.f0c[j]]) for j in range(self.data.g)]
        basis = np.zeros((0, self.dK + self.dF), dtype=np.int64)
        frontier = span
        while frontier:
            cand = np.concatenate([basis, np.array(frontier, dtype=np.int64)]) if basis.size else np.array(frontier)
            R, piv = rref_mod(cand, p)
            if len(piv) == basis.shape[0]:
                break
            basis = R
            frontier = [(Xv @ row) % p for row in basis for Xv in X]
        return basis.shape[0] == self.dK + self.dF

    def enumerate(self, cap: int | None = None) -> LiftEnumeration:
        p = self.data.p
        cap = candidate_cap(cap)
        M, b = self.affine()
        step = 1 << 14
        chunks = []
        if p ** self.N <= cap:
            mode = "exhaustive"
            candidates = p ** self.N
            for start in range(0, candidates, step):
                Z = all_vectors(p, self.N, start, start + step)
                ok = np.all(((Z @ M.T) + b) % p == 0, axis=1) if M.shape[0] else np.ones(len(Z), bool)
                chunks.append(Z[ok])
                self._check_affine(Z[:: max(1, len(Z) // 8)])
        else:
            mode = "affine"
            x0 = solve_mod(M, (-b) % p, p) if M.shape[0] else np.zeros(self.N, dtype=np.int64)
            if x0 is None:
                return LiftEnumeration(0, 0, mode, 0)
            null = nullspace_mod(M, p) if M.shape[0] else np.eye(self.N, dtype=np.int64)
            if p ** null.shape[0] > cap:
                raise CapExceeded(f"{p}^{null.shape[0]} candidates exceed the cap {cap}")
            candidates = p ** null.shape[0]
            for start in range(0, candidates, step):
                coeffs = all_vectors(p, null.shape[0], start, start + step)
                chunks.append((x0 + coeffs @ null) % p)
        sols = np.concatenate(chunks) if chunks else np.zeros((0, self.N), dtype=np.int64)
        # the conditions are evaluated directly on a spread of the solutions
        for z in sols[:: max(1, len(sols) // 64)]:
            if self.residual(z).any():
                raise OracleError("affine model disagrees with the direct conditions")
        orbit = p ** (self.dF * self.dK)
        if len(sols) % orbit:
            raise OracleError("solution set is not a union of full orbits")
        canon = sorted({tuple(int(x) for x in r) for r in self.canonical_many(sols)})
        if len(canon) * orbit != len(sols):
            raise OracleError("orbits are not free")
        return LiftEnumeration(len(canon), len(sols), mode, candidates, canon)

    def _check_affine(self, Z: np.ndarray):
        M, b = self.affine()
        p = self.data.p
        for z in Z:
            if not np.array_equal(self.residual(z), (M @ z + b) % p):
                raise OracleError("conditions are not affine in the block coordinates")

    def orbit_space(self):
        """RREF rows spanning the changes ``z -> z + T φ`` under ``[[1, φ], [0, 1]]``."""
        if self._orbit is None:
            p = self.data.p
            cols = []
            zero_C = [np.zeros((self.dK, self.dF), dtype=np.int64)] * self.data.nvars
            zero_k = [np.zeros(self.dK, dtype=np.int64)] * self.data.g
            for phi in np.eye(self.dK * self.dF, dtype=np.int64):
                cols.append(self.pack(*self.act(zero_C, zero_k, phi.reshape(self.dK, self.dF))))
            T = np.array(cols, dtype=np.int64).reshape(len(cols), self.N)
            R, piv = rref_mod(T, p) if len(cols) else (np.zeros((0, self.N), dtype=np.int64), [])
            if len(piv) != len(cols):
                raise OracleError("orbits are not free")
            self._orbit = (np.asarray(R, dtype=np.int64)[:len(piv)], list(piv))
        return self._orbit

    def act(self, C, kk, P_):
        p = self.data.p
        C2 = [(C[v] + P_ @ self.F0.action[v] - self.K.action[v] @ P_) % p for v in range(self.data.nvars)]
        k2 = [(kk[j] + P_ @ self.f0c[j]) % p for j in range(self.data.g)]
        return C2, k2

    def canonical_many(self, Z: np.ndarray) -> np.ndarray:
        """Normal forms modulo the orbit space: pivot coordinates cleared."""
        p = self.data.p
        R, piv = self.orbit_space()
        Z = np.asarray(Z, dtype=np.int64) % p
        if not piv:
            return Z
        return (Z - Z[:, piv] @ R) % p

    def canonical(self, z: np.ndarray) -> tuple:
        return tuple(int(x) for x in self.canonical_many(np.asarray(z).reshape(1, -1))[0])


# ---------------------------------------------------------------- flat lifts by kernels

class FlatLiftOracle:
    """Flat lifts ``E -> E/N`` of ``E0 -> E0/N0`` as kernels ``N = I·Ñ + ⟨ñ_i + k_i⟩``
    where Ñ lifts N0 and each k_i runs over representatives of ``IE / I·Ñ``.

    A candidate is a solution iff ``E/N`` has the length of ``E0/N0`` plus that
    of ``IE/I·Ñ``, read off in ``E / m^d E``."""

    def __init__(self, p: int, nvars: int, ring_gens: list, g: int, E_rels: list, n0: list,
                 I_gens: list, d: int):
        self.p, self.nvars, self.g, self.d = p, nvars, g, d
        self.n0 = [v for v in n0]
        T = self.T = Truncation(nvars, g, d, p)
        fixed = ideal_times_gens(ring_gens, g) + list(E_rels)
        W = [mul_poly_vec(a, n, p) for a in I_gens for n in self.n0]
        self.red = Reducer(np.concatenate([T.multiples(fixed), T.multiples(W)]), T.dim, p)
        IE = [{(j, e): c for e, c in a.items()} for a in I_gens for j in range(g)]
        ie_rows = T.multiples(IE)
        proj = self.red.project(ie_rows) if ie_rows.size else np.zeros((0, self.red.quotient_dim), np.int64)
        _, piv = rref_mod(proj.T, p) if proj.size else (None, [])
        self.reps = [ie_rows[i] for i in piv]
        self.dimK = len(self.reps)
        # multiples of n_i + k_i by every monomial below the truncation degree
        self._mult_shifts = [list(T.monos) for _ in self.n0]
        self.rep_vecs = [{T.terms[i]: int(c) for i, c in enumerate(rep) if c} for rep in self.reps]
        self.rep_shift_rows = [[self._shift_rows(rv, self._mult_shifts[i]) for i in range(len(self.n0))]
                               for rv in self.rep_vecs]
        self.base_shift_rows = [self._shift_rows(n, self._mult_shifts[i]) for i, n in enumerate(self.n0)]
        q = self.red.quotient_dim
        allrows = [r for r in self.base_shift_rows if r.size] + ([proj] if proj.size else [])
        self.dimF0 = q - (rank_mod(np.concatenate(allrows), p) if allrows else 0)
        self.quotient_dim = q

    def _shift_rows(self, v: Vec, shifts: list) -> np.ndarray:
        if not shifts:
            return np.zeros((0, self.red.quotient_dim), dtype=np.int64)
        rows = np.array([self.T.shift(v, mu) for mu in shifts], dtype=np.int64)
        return self.red.project(rows)

    def rows_for(self, k: Sequence[np.ndarray]) -> np.ndarray:
        p = self.p
        blocks = []
        for i in range(len(self.n0)):
            B = self.base_shift_rows[i].copy()
            for c in range(self.dimK):
                if k[i][c]:
                    B = (B + int(k[i][c]) * self.rep_shift_rows[c][i]) % p
            blocks.append(B)
        if not blocks:
            return np.zeros((0, self.quotient_dim), dtype=np.int64)
        return np.concatenate(blocks)

    def is_valid(self, k: Sequence[np.ndarray]) -> bool:
        rows = self.rows_for(k)
        length = self.quotient_dim - (rank_mod(rows, self.p) if rows.size else 0)
        return length == self.dimF0 + self.dimK

    def enumerate(self, cap: int | None = None) -> list[tuple]:
        n = len(self.n0) * self.dimK
        cap = candidate_cap(cap)
        if self.p ** n > cap:
            raise CapExceeded(f"{self.p}^{n} candidates exceed the cap {cap}")
        out = []
        for flat in all_vectors(self.p, n):
            k = [flat[i * self.dimK:(i + 1) * self.dimK] for i in range(len(self.n0))]
            if self.is_valid(k):
                out.append(tuple(int(x) for x in flat))
        return out

    def coordinates(self, diffs: Sequence[Vec]) -> tuple | None:
        """Representative coordinates of elements of IE (one per N0 generator)."""
        if not self.reps:
            return tuple()
        R = self.red.project(np.array(self.reps, dtype=np.int64))
        out = []
        for v in diffs:
            x = solve_mod(R.T, self.red.project(self.T.vector(v))[0], self.p)
            if x is None:
                return None
            out.extend(int(c) for c in x)
        return tuple(out)


def stable_flat_enumeration(build, d0: int, cap: int | None = None, max_d: int | None = None):
    """Enumerate at truncation degrees d and d+1 until the two answers agree."""
    d = d0
    max_d = max_d or max(d0 + 6, 3 * d0)
    prev = None
    while d <= max_d:
        orc = build(d)
        sols = orc.enumerate(cap)
        key = (orc.dimK, tuple(sols))
        if prev is not None and key == prev[1]:
            return prev[0], sols
        prev = (orc, key)
        d += 1
    raise OracleError("flat-lift enumeration did not stabilize")


# ---------------------------------------------------------------- sections of trivial extensions

def enumerate_derivation_values(p: int, nvars1: int, base_vars: Sequence[int], ring1_gens: Sequence[dict],
                                I1: FiniteModule, cap: int | None = None) -> list[list[np.ndarray]]:
    """All tuples (δ_i) in I1 (one per base variable) with ``Σ ∂h/∂x_i δ_i = 0`` for
    each relation h of B1: the algebra sections of B1[I1] -> B1."""
    n = len(base_vars) * I1.dim
    cap = candidate_cap(cap)
    if p ** n > cap:
        raise CapExceeded(f"{p}^{n} sections exceed the cap {cap}")
    partials = []
    for h in ring1_gens:
        row = []
        for i in base_vars:
            dh = {}
            for e, c in h.items():
                if e[i]:
                    f = list(e)
                    f[i] -= 1
                    dh[tuple(f)] = (dh.get(tuple(f), 0) + c * e[i]) % p
            row.append(I1.poly_matrix({e: c for e, c in dh.items() if c}))
        partials.append(row)
    out = []
    for flat in all_vectors(p, n):
        ds = [flat[k * I1.dim:(k + 1) * I1.dim] for k in range(len(base_vars))]
        ok = True
        for row in partials:
            acc = np.zeros(I1.dim, dtype=np.int64)
            for Mi, di in zip(row, ds):
                acc = (acc + Mi @ di) % p
            if acc.any():
                ok = False
                break
        if ok:
            out.append(ds)
    return out


def substitute(v: Vec, images: Sequence[dict], p: int) -> Vec:
    """Apply ``x_i |-> images[i]`` to a vector of polynomials (dicts)."""
    out: Vec = {}
    cache: dict = {}
    for (pos, e), c in v.items():
        term = {(0,) * len(e): c}
        for i, k in enumerate(e):
            for _ in range(k):
                term = _mul(term, images[i], p)
        for f, a in term.items():
            out[(pos, f)] = (out.get((pos, f), 0) + a) % p
    return {t: c for t, c in out.items() if c}


def _mul(a: dict, b: dict, p: int) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = _add(e1, e2)
            out[e] = (out.get(e, 0) + c1 * c2) % p
    return {e: c for e, c in out.items() if c}


# ---------------------------------------------------------------- Ext^1 by extension enumeration

@dataclass
class ExtEnumeration:
    cocycles: int
    stabilizer: int
    order: int
    dimension: int
    mode: str


def ext1_enumeration(p: int, nvars: int, ring_gens: Sequence[dict], A: FiniteModule, C: FiniteModule,
                     cap: int | None = None) -> ExtEnumeration:
    """``|Ext^1(C, A)|`` from module structures ``[[A_v, D_v], [0, C_v]]`` on A ⊕ C:
    the number of valid D times the stabilizer ``Hom(C, A)`` over ``p^(dim A·dim C)``."""
    dA, dC = A.dim, C.dim
    N = nvars * dA * dC
    cap = candidate_cap(cap)

    def residual(z):
        D = [z[v * dA * dC:(v + 1) * dA * dC].reshape(dA, dC) for v in range(nvars)]
        X = []
        for v in range(nvars):
            M = np.zeros((dA + dC, dA + dC), dtype=np.int64)
            M[:dA, :dA] = A.action[v]
            M[dA:, dA:] = C.action[v]
            M[:dA, dA:] = D[v]
            X.append(M)
        out = []
        for v in range(nvars):
            for w in range(v + 1, nvars):
                out.append(((X[v] @ X[w] - X[w] @ X[v]) % p)[:dA, dA:].reshape(-1))
        cache: dict = {}
        for h in ring_gens:
            out.append(poly_on(h, X, p, cache)[:dA, dA:].reshape(-1))
        return np.concatenate(out) % p if out else np.zeros(0, dtype=np.int64)

    b = residual(np.zeros(N, dtype=np.int64))
    cols = []
    for i in range(N):
        e = np.zeros(N, dtype=np.int64)
        e[i] = 1
        cols.append((residual(e) - b) % p)
    M = np.array(cols, dtype=np.int64).T.reshape(b.size, N) if N else np.zeros((b.size, 0), np.int64)
    if p ** N <= cap:
        mode = "exhaustive"
        count = 0
        step = 1 << 14
        for start in range(0, p ** N, step):
            Z = all_vectors(p, N, start, start + step)
            ok = np.all(((Z @ M.T) + b) % p == 0, axis=1) if M.shape[0] else np.ones(len(Z), bool)
            count += int(ok.sum())
    else:
        mode = "affine"
        null = nullspace_mod(M, p) if M.shape[0] else np.eye(N, dtype=np.int64)
        count = p ** null.shape[0]
    nphi = dA * dC
    if p ** nphi > cap:
        raise CapExceeded(f"{p}^{nphi} splittings exceed the cap {cap}")
    stab = 0
    for phi in all_vectors(p, nphi):
        P_ = phi.reshape(dA, dC)
        if all(not ((A.action[v] @ P_ - P_ @ C.action[v]) % p).any() for v in range(nvars)):
            stab += 1
    num = count * stab
    den = p ** nphi
    if num % den:
        raise OracleError("extension count is not an integer")
    order = num // den
    dim = 0
    while p ** dim < order:
        dim += 1
    if p ** dim != order:
        raise OracleError("Ext order is not a power of p")
    return ExtEnumeration(count, stab, order, dim, mode)


# ---------------------------------------------------------------- graded Betti numbers

def graded_first_betti(p: int, nvars: int, ring_gens: Sequence[dict], g: int, gens: Sequence[Vec],
                       max_degree: int) -> dict:
    """Per-degree count of minimal first syzygies of homogeneous generators of a
    submodule of a free module over a standard graded quotient ring.

    Returns ``{degree: number}`` for degrees up to ``max_degree``; also checks
    that the generators are minimal."""
    degs = []
    for v in gens:
        ds = {sum(e) for _, e in v}
        if len(ds) != 1:
            raise OracleError("generators must be homogeneous")
        degs.append(ds.pop())
    for h in ring_gens:
        if len({sum(e) for e in h}) != 1:
            raise OracleError("ring ideal must be homogeneous")

    def graded_piece(deg):
        monos = [e for e in monomials_below(nvars, deg + 1) if sum(e) == deg]
        return monos

    pieces = {}

    def quotient(deg):
        """Basis of B_deg as a Reducer over the monomials of degree deg."""
        if deg in pieces:
            return pieces[deg]
        monos = graded_piece(deg) if deg >= 0 else []
        idx = {e: i for i, e in enumerate(monos)}
        rows = []
        for h in ring_gens:
            hd = sum(next(iter(h)))
            if hd > deg:
                continue
            for mu in graded_piece(deg - hd):
                r = np.zeros(len(monos), dtype=np.int64)
                for e, c in h.items():
                    r[idx[_add(e, mu)]] = (r[idx[_add(e, mu)]] + c) % p
                rows.append(r)
        red = Reducer(np.array(rows, dtype=np.int64) if rows else np.zeros((0, len(monos)), np.int64),
                      len(monos), p)
        pieces[deg] = (monos, idx, red)
        return pieces[deg]

    def source_basis(deg):
        """Basis elements of ⊕ B_{deg - d_i}: (i, monomial)."""
        out = []
        for i, di in enumerate(degs):
            if deg - di < 0:
                continue
            monos, _, red = quotient(deg - di)
            out.extend((i, monos[c]) for c in red.free)
        return out

    def target_coords(deg, vec_terms):
        monos, idx, red = quotient(deg)
        x = np.zeros((g, len(monos)), dtype=np.int64)
        for (pos, e), c in vec_terms.items():
            x[pos, idx[e]] = (x[pos, idx[e]] + c) % p
        return np.concatenate([red.project(x[pos])[0] for pos in range(g)])

    def source_coords(deg, terms):
        basis = source_basis(deg)
        out = np.zeros(len(basis), dtype=np.int64)
        for i, di in enumerate(degs):
            if deg - di < 0:
                continue
            monos, idx, red = quotient(deg - di)
            x = np.zeros(len(monos), dtype=np.int64)
            for (j, e), c in terms.items():
                if j == i:
                    x[idx[e]] = (x[idx[e]] + c) % p
            y = red.project(x)[0]
            off = [k for k, (ii, _) in enumerate(basis) if ii == i]
            out[off] = y
        return out

    Z = {}
    result = {}
    for deg in range(min(degs) if degs else 0, max_degree + 1):
        basis = source_basis(deg)
        if not basis:
            Z[deg] = np.zeros((0, 0), dtype=np.int64)
            continue
        cols = []
        for i, mu in basis:
            img = {}
            for (pos, e), c in gens[i].items():
                t = (pos, _add(e, mu))
                img[t] = (img.get(t, 0) + c) % p
            cols.append(target_coords(deg, img))
        Mat = np.array(cols, dtype=np.int64).T
        ker = nullspace_mod(Mat, p)
        Z[deg] = ker
        prev = Z.get(deg - 1)
        mz_rows = []
        if prev is not None and prev.size:
            prev_basis = source_basis(deg - 1)
            for z in prev:
                for v in range(nvars):
                    unit = tuple(1 if k == v else 0 for k in range(nvars))
                    terms = {}
                    for coef, (i, mu) in zip(z, prev_basis):
                        if coef:
                            t = (i, _add(mu, unit))
                            terms[t] = (terms.get(t, 0) + int(coef)) % p
                    mz_rows.append(source_coords(deg, terms))
        r_mz = rank_mod(np.array(mz_rows), p) if mz_rows else 0
        new = ker.shape[0] - r_mz
        if new:
            result[deg] = new
    return result


# ---------------------------------------------------------------- reading solutions into the block model

def block_signature(orc: BlockLiftOracle, sol) -> tuple:
    """Canonical block coordinates of a Solution computed elsewhere, so that it
    can be looked up in the enumerated solution set.  Only the maps of the
    solution are evaluated; nothing is solved for on the oracle side."""
    p = orc.data.p
    F = sol.F
    P = F.ambient

    def unit_col(pos, e, n):
        col = [P.zero] * n
        col[pos] = P.monomial(e, 1)
        return col

    lifts = []
    for pos, e in orc.F0.basis_terms:
        x = sol.proj.lift(unit_col(pos, e, orc.data.m))
        if x is None:
            raise OracleError("projection of the solution is not surjective")
        lifts.append(x)
    kimg = [sol.kappa.apply_coeffs(unit_col(pos, e, orc.data.r)) for pos, e in orc.K.basis_terms]

    def decompose(x):
        fc = orc.F0.coords(col_vec(sol.proj.apply_coeffs(x), p))
        rest = list(x)
        for c, l in zip(fc, lifts):
            if c:
                rest = [a - int(c) * b for a, b in zip(rest, l)]
        kc = sol.kappa.lift(F.reduce(rest))
        if kc is None:
            raise OracleError("difference does not lie in K")
        return orc.K.coords(col_vec(kc, p)), fc

    C = []
    for v in range(orc.data.nvars):
        cols = []
        for b, l in enumerate(lifts):
            k, f = decompose(F.reduce([P.gens[v] * c for c in l]))
            if not np.array_equal(f, orc.F0.action[v][:, b]):
                raise OracleError("solution does not induce the action on F0")
            cols.append(k)
        C.append(np.array(cols, dtype=np.int64).T.reshape(orc.dK, orc.dF))
    kk = []
    for j in range(orc.data.g):
        k, f = decompose(sol.f.matrix[j])
        if not np.array_equal(f, orc.f0c[j]):
            raise OracleError("solution does not lift f0")
        kk.append(k)
    # kappa of the K basis should be the K basis; a different kappa is an isomorphic copy
    for c, img in enumerate(kimg):
        k, f = decompose(img)
        if f.any() or not np.array_equal(k, np.eye(orc.dK, dtype=np.int64)[c]):
            raise OracleError("kappa does not identify K")
    return orc.canonical(orc.pack(C, kk))


def lift_data_from_setup(S) -> LiftData:
    """Raw presentations of a setup over a prime field."""
    p = S.field.characteristic
    if not p:
        raise OracleError("the enumeration oracle needs a prime field")

    def pd(f):
        return poly_dict(S.P(f), p)

    return LiftData(p, S.P.nvars, [pd(h) for h in S.B.ideal.basis], S.E.ngens,
                    [col_vec(r, p) for r in S.E.rels], S.F0.ngens, list(S.F0.relation_vectors()),
                    [col_vec(r, p) for r in S.f0.matrix], S.K.ngens, list(S.K.relation_vectors()),
                    [pd(g) for g in S.I_gens], [col_vec(r, p) for r in S.u0.matrix])
