"""Buchberger's algorithm on submodules of free modules P^m.

A vector is a dict ``{(pos, exps): coeff}`` with no zero coefficients.  The
term order is position-over-term (smaller position index is larger) refined
by a monomial order, with an optional block of leading weights that makes
elimination orders possible.  Ideals are the case m = 1.
"""
from __future__ import annotations

from fractions import Fraction
from heapq import heapify, heappop, heappush
from typing import Callable, Iterable, Sequence

from .ring import MonomialOrder

Vec = dict


class TermOrder:
    def __init__(self, mono: MonomialOrder, prefix: Callable[[int, tuple], tuple] | None = None):
        self.mono = mono
        self.prefix = prefix
        self._neg: dict = {}

    def key(self, term: tuple) -> tuple:
        pos, e = term
        k = (-pos,) + self.mono.key(e)
        if self.prefix is not None:
            k = tuple(self.prefix(pos, e)) + k
        return k

    def negkey(self, term: tuple) -> tuple:
        k = self._neg.get(term)
        if k is None:
            k = tuple(-x for x in self.key(term))
            self._neg[term] = k
        return k

    def lead(self, v: Vec) -> tuple:
        return min(v, key=self.negkey)


def _add_exps(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub_exps(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


class _Arith:
    __slots__ = ("p",)

    def __init__(self, p: int):
        self.p = p

    def inv(self, c):
        return pow(c, -1, self.p) if self.p else 1 / Fraction(c)

    def norm(self, c):
        return c % self.p if self.p else c


class Basis:
    """Monic vectors indexed by their leading terms, with full reduction."""

    def __init__(self, order: TermOrder, p: int, vecs: Iterable[Vec] = ()):
        self.order = order
        self.ar = _Arith(p)
        self.p = p
        self.elems: list[tuple[tuple, list]] = []  # (lead term, tail terms)
        self.vecs: list[Vec] = []
        self.active: list[bool] = []
        self._by_pos: dict[int, list[int]] = {}
        for v in vecs:
            self.add(v)

    def add(self, v: Vec) -> int:
        """Insert v (made monic); returns its index."""
        lt = self.order.lead(v)
        c = self.ar.inv(v[lt])
        p = self.p
        if p:
            mv = {t: a * c % p for t, a in v.items()}
        else:
            mv = {t: a * c for t, a in v.items()}
        tail = [(t, a) for t, a in mv.items() if t != lt]
        idx = len(self.elems)
        self.elems.append((lt, tail))
        self.vecs.append(mv)
        self.active.append(True)
        self._by_pos.setdefault(lt[0], []).append(idx)
        return idx

    def deactivate(self, idx: int):
        self.active[idx] = False
        self._by_pos[self.elems[idx][0][0]].remove(idx)

    def lead(self, idx: int) -> tuple:
        return self.elems[idx][0]

    def divisor(self, term: tuple, skip: int | None = None) -> int | None:
        pos, e = term
        for idx in self._by_pos.get(pos, ()):
            if idx != skip and _divides(self.elems[idx][0][1], e):
                return idx
        return None

    def reduce(self, v: Vec, skip: int | None = None) -> Vec:
        """Full normal form of v (no term divisible by an active leading term)."""
        if not v:
            return {}
        p = self.p
        nk = self.order.negkey
        f = dict(v)
        heap = [(nk(t), t) for t in f]
        heapify(heap)
        rem = {}
        while heap:
            _, t = heappop(heap)
            c = f.pop(t, None)
            if c is None:
                continue
            g = self.divisor(t, skip)
            if g is None:
                rem[t] = c
                continue
            (gp, ge), tail = self.elems[g]
            shift = _sub_exps(t[1], ge)
            for (tp, te), a in tail:
                nt = (tp, _add_exps(te, shift))
                old = f.get(nt)
                if old is None:
                    nc = -c * a
                    if p:
                        nc %= p
                    f[nt] = nc
                    heappush(heap, (nk(nt), nt))
                else:
                    nc = old - c * a
                    if p:
                        nc %= p
                    if nc:
                        f[nt] = nc
                    else:
                        del f[nt]
        return rem

    def reduce_with_quotients(self, v: Vec) -> tuple[Vec, dict]:
        """Normal form plus the multipliers used: ``v = rem + sum q_i * vec_i``.

        Quotients are polynomials as dicts ``{exps: coeff}`` keyed by basis index."""
        p = self.p
        nk = self.order.negkey
        f = dict(v)
        heap = [(nk(t), t) for t in f]
        heapify(heap)
        rem = {}
        quots: dict[int, dict] = {}
        while heap:
            _, t = heappop(heap)
            c = f.pop(t, None)
            if c is None:
                continue
            g = self.divisor(t)
            if g is None:
                rem[t] = c
                continue
            (gp, ge), tail = self.elems[g]
            shift = _sub_exps(t[1], ge)
            q = quots.setdefault(g, {})
            q[shift] = self.ar.norm(q.get(shift, 0) + c)
            for (tp, te), a in tail:
                nt = (tp, _add_exps(te, shift))
                nc = f.get(nt, 0) - c * a
                if p:
                    nc %= p
                if nc:
                    if nt not in f:
                        heappush(heap, (nk(nt), nt))
                    f[nt] = nc
                else:
                    f.pop(nt, None)
        return rem, {i: {e: c for e, c in q.items() if c} for i, q in quots.items()}


def _shift(v: Vec, e: tuple) -> Vec:
    return {(pos, _add_exps(x, e)): c for (pos, x), c in v.items()}


def _sub(a: Vec, b: Vec, p: int) -> Vec:
    out = dict(a)
    for t, c in b.items():
        nc = out.get(t, 0) - c
        if p:
            nc %= p
        if nc:
            out[t] = nc
        else:
            out.pop(t, None)
    return out


def groebner_vectors(gens: Sequence[Vec], order: TermOrder, p: int,
                     product_criterion: bool = False) -> list[Vec]:
    """Reduced Gröbner basis of the submodule generated by ``gens``.

    Pairs are chosen by the normal strategy (least lcm first, ties by
    insertion indices) and pruned with the Gebauer-Moeller criteria.  The
    coprime-leading-term criterion is valid only for ideals, so callers
    enable it only when every vector lives in position 0.
    """
    basis = Basis(order, p)
    nk = order.negkey
    G: list[int] = []
    pairs: list[tuple[tuple, int, int, tuple]] = []  # (negkey of lcm term, i, j, lcm term)

    def update(h: int):
        nonlocal G, pairs
        hpos, he = basis.lead(h)
        cands = []
        for g in G:
            gpos, ge = basis.lead(g)
            if gpos == hpos:
                cands.append((g, _lcm(he, ge), not any(a and b for a, b in zip(he, ge))))
        kept = []
        rest = list(cands)
        while rest:
            g, l, coprime = rest.pop(0)
            if (product_criterion and coprime) or not any(
                    _divides(l2, l) for _, l2, _ in rest + kept):
                kept.append((g, l, coprime))
        new_pairs = []
        for (nkey, i, j, lt) in pairs:
            pos, l = lt
            if pos == hpos and _divides(he, l):
                li = _lcm(basis.lead(i)[1], he)
                lj = _lcm(basis.lead(j)[1], he)
                if li != l and lj != l:
                    continue
            new_pairs.append((nkey, i, j, lt))
        for g, l, coprime in kept:
            if product_criterion and coprime:
                continue
            t = (hpos, l)
            new_pairs.append((nk(t), g, h, t))
        pairs = new_pairs
        G = [g for g in G if not (basis.lead(g)[0] == hpos and _divides(he, basis.lead(g)[1]))]
        for g in range(len(basis.active)):
            if basis.active[g] and g not in G and g != h:
                basis.deactivate(g)
        G.append(h)

    for v in gens:
        r = basis.reduce(v)
        if r:
            update(basis.add(r))
    while pairs:
        best = min(range(len(pairs)), key=lambda n: pairs[n][:3])
        _, i, j, (pos, l) = pairs.pop(best)
        vi, vj = basis.vecs[i], basis.vecs[j]
        s = _sub(_shift(vi, _sub_exps(l, basis.lead(i)[1])), _shift(vj, _sub_exps(l, basis.lead(j)[1])), p)
        r = basis.reduce(s)
        if r:
            update(basis.add(r))
    # interreduce: each element against the others
    final = Basis(order, p)
    for g in G:
        final.add(basis.vecs[g])
    out = []
    for idx in range(len(final.elems)):
        r = final.reduce(final.vecs[idx], skip=idx)
        out.append(r)
    norm = Basis(order, p, out)
    result = norm.vecs
    result.sort(key=lambda v: nk(order.lead(v)))
    return result


def spoly(a: Vec, b: Vec, order: TermOrder, p: int) -> Vec:
    la, lb = order.lead(a), order.lead(b)
    if la[0] != lb[0]:
        return {}
    ar = _Arith(p)
    l = _lcm(la[1], lb[1])
    ca, cb = ar.inv(a[la]), ar.inv(b[lb])
    sa = {t: ar.norm(c * ca) for t, c in _shift(a, _sub_exps(l, la[1])).items()}
    sb = {t: ar.norm(c * cb) for t, c in _shift(b, _sub_exps(l, lb[1])).items()}
    return _sub(sa, sb, p)


class LiftEngine:
    """Solve ``sum a_i * col_i = y`` modulo a relation submodule of P^m.

    Built from one Gröbner basis of the tagged generators ``(col_i, e_{m+i})``
    and ``(rel, 0)``; the basis elements supported in the tag block generate
    the syzygies of the columns modulo the relations.
    """

    def __init__(self, cols: Sequence[Vec], rels: Sequence[Vec], m: int, nvars: int,
                 mono: MonomialOrder, p: int):
        self.m = m
        self.h = len(cols)
        zero = (0,) * nvars
        gens = []
        for i, col in enumerate(cols):
            v = dict(col)
            v[(m + i, zero)] = 1 if p else Fraction(1)
            gens.append(v)
        gens.extend(dict(r) for r in rels if r)
        order = TermOrder(mono)
        self.gb = groebner_vectors(gens, order, p)
        self.basis = Basis(order, p, self.gb)
        self.p = p

    def syzygies(self) -> list[Vec]:
        m = self.m
        out = []
        for v in self.gb:
            if min(pos for pos, _ in v) >= m:
                out.append({(pos - m, e): c for (pos, e), c in v.items()})
        return out

    def lift(self, y: Vec) -> Vec | None:
        r = self.basis.reduce(y)
        m, p = self.m, self.p
        if any(pos < m for pos, _ in r):
            return None
        return {(pos - m, e): (-c % p if p else -c) for (pos, e), c in r.items()}
