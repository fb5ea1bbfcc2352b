"""Dense exact linear algebra over QQ or GF(p).

Matrices are lists of rows; entries are Fractions (characteristic 0) or ints
in range(p).  Nothing here rounds.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly.field import ExactField

Matrix = list


def zeros(field: ExactField, r: int, c: int) -> Matrix:
    return [[field.zero] * c for _ in range(r)]


def identity(field: ExactField, n: int) -> Matrix:
    m = zeros(field, n, n)
    for i in range(n):
        m[i][i] = field.one
    return m


def rref(field: ExactField, M: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    p = field.characteristic
    A = [list(r) for r in M]
    if not A:
        return [], []
    n = len(A[0]) if ncols is None else ncols
    pivots = []
    row = 0
    for col in range(n):
        piv = next((i for i in range(row, len(A)) if A[i][col]), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        inv = field.inv(A[row][col])
        A[row] = [(a * inv) % p if p else a * inv for a in A[row]]
        for i in range(len(A)):
            if i != row and A[i][col]:
                c = A[i][col]
                r0 = A[row]
                if p:
                    A[i] = [(a - c * b) % p for a, b in zip(A[i], r0)]
                else:
                    A[i] = [a - c * b for a, b in zip(A[i], r0)]
        pivots.append(col)
        row += 1
        if row == len(A):
            break
    return A[:row], pivots


def rank(field: ExactField, M: Sequence[Sequence]) -> int:
    return len(rref(field, M)[1])


def nullspace(field: ExactField, M: Sequence[Sequence], ncols: int) -> list[list]:
    """Basis of ``{v : M v = 0}``; one vector per free column, free entry 1."""
    R, piv = rref(field, M, ncols) if M else ([], [])
    free = [j for j in range(ncols) if j not in piv]
    out = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for i, pc in enumerate(piv):
            v[pc] = field.neg(R[i][f])
        out.append(v)
    return out


def solve(field: ExactField, M: Sequence[Sequence], b: Sequence, ncols: int) -> list | None:
    """Some x with ``M x = b`` (free variables set to zero), or None."""
    if not M:
        return [field.zero] * ncols if not any(b) else None
    aug = [list(r) + [bi] for r, bi in zip(M, b)]
    R, piv = rref(field, aug, ncols + 1)
    if ncols in piv:
        return None
    x = [field.zero] * ncols
    for i, pc in enumerate(piv):
        x[pc] = R[i][ncols]
    return x


def matmul(field: ExactField, A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    p = field.characteristic
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        r = []
        for j in range(cols):
            s = sum(row[k] * B[k][j] for k in range(inner))
            r.append(s % p if p else Fraction(s))
        out.append(r)
    return out


def matvec(field: ExactField, A: Sequence[Sequence], v: Sequence) -> list:
    p = field.characteristic
    out = []
    for row in A:
        s = sum(a * b for a, b in zip(row, v))
        out.append(s % p if p else Fraction(s))
    return out


def transpose(A: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*A)]


def inverse(field: ExactField, A: Sequence[Sequence]) -> Matrix | None:
    n = len(A)
    aug = [list(r) + e for r, e in zip(A, identity(field, n))]
    R, piv = rref(field, aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n or any(pc >= n for pc in piv[:n]) or len(R) < n:
        return None
    if any(pc >= n for pc in piv):
        return None
    return [r[n:] for r in R]


def row_space_basis(field: ExactField, rows: Sequence[Sequence], ncols: int) -> Matrix:
    return rref(field, rows, ncols)[0] if rows else []


def in_row_space(field: ExactField, rows: Sequence[Sequence], v: Sequence, ncols: int) -> bool:
    return rank(field, list(rows) + [list(v)]) == (rank(field, rows) if rows else 0)
