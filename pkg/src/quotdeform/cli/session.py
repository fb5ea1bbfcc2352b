"""Evaluation of session scripts and the text reports of each command."""
from __future__ import annotations

import random
from typing import Callable

from ..deform import oracle as orc
from ..deform.obstruction import (RouteUnavailable, atiyah_obstruction, elementary_obstruction,
                                  torsor_action, torsor_difference)
from ..deform.sections import NotASection
from ..deform.setup import DeformationSetup, NotFlat, SetupError, build_setup, flat_problem
from ..fpmod.module import FPModule, ModuleHom, NotFiniteDimensional, NotWellDefined, meet_rings, zero_hom
from ..fpmod.ops import HomModule
from ..homext import NotExact, ext1
from ..kahler import NotSquareZero, kahler
from ..poly.field import GF, QQ
from ..poly.quotient import QuotientRing, coproduct_ring
from ..poly.ring import LEX, GREVLEX, PolyRing, PolynomialSyntaxError, StructuralError
from ..quotapp import QuotPoint, perfect_check, standard_battery, tangent
from .parser import Poly, ScriptError, SessionScript, Stmt, locate


class CommandError(Exception):
    """A failure that maps to an exit code: 3 for violated mathematical
    preconditions, 4 for the enumeration cap."""

    def __init__(self, category: str, detail: str, code: int):
        super().__init__(detail)
        self.category = category
        self.detail = detail
        self.code = code


PRECONDITION = (StructuralError, SetupError, NotFlat, NotSquareZero, NotWellDefined, NotExact, NotASection,
                RouteUnavailable, NotFiniteDimensional, orc.OracleError, ZeroDivisionError)


def fmt(x) -> str:
    return str(x)


def fmt_row(row) -> str:
    return "[" + ", ".join(fmt(c) for c in row) + "]"


def fmt_matrix(rows) -> str:
    return "[" + ", ".join(fmt_row(r) for r in rows) + "]"


def fmt_bool(b: bool) -> str:
    return "true" if b else "false"


class Session:
    def __init__(self, script: SessionScript, prime: int | None = None, seed: int = 0, cap: int | None = None):
        self.script = script
        self.prime = prime
        self.seed = seed
        self.cap = cap
        self.env: dict = {}
        self._qrings: dict = {}
        self._rebuilt: dict = {}

    # -- errors and lookup
    def error(self, category: str, msg: str, offset: int):
        line, col = locate(self.script.source, offset)
        raise ScriptError(category, msg, line, col)

    def get(self, name: str, kinds: tuple, offset: int, what: str):
        obj = self.env.get(name)
        if obj is None:
            self.error("semantic", f"unknown name {name!r}", offset)
        if isinstance(obj, PolyRing) and QuotientRing in kinds:
            return self.qring(name)
        if not isinstance(obj, kinds):
            self.error("semantic", f"{name!r} is not a {what}", offset)
        return obj

    def qring(self, name: str) -> QuotientRing:
        obj = self.env[name]
        if isinstance(obj, QuotientRing):
            return obj
        q = self._qrings.get(name)
        if q is None:
            q = self._qrings[name] = QuotientRing(obj, [], name=name)
        return q

    def poly(self, ring: PolyRing, p: Poly):
        try:
            return ring.parse(p.text)
        except PolynomialSyntaxError as e:
            cat = "semantic" if "unknown variable" in e.detail else "syntax"
            self.error(cat, e.detail, p.offset + (e.position or 0))
        except ZeroDivisionError as e:
            raise CommandError("precondition", f"coefficient {p.text!r} has no image in {ring.field}: {e}", 3)

    def matrix(self, ring: PolyRing, rows, width: int | None, offset: int, what: str):
        out = []
        for r in rows:
            if width is not None and len(r) != width:
                at = r[0].offset if r else offset
                self.error("semantic", f"{what}: expected rows of length {width}, got {len(r)}", at)
            out.append([self.poly(ring, c) for c in r])
        return out

    # -- declarations
    def declare(self, st: Stmt):
        try:
            getattr(self, "d_" + st.kind)(st)
        except PRECONDITION as e:
            raise CommandError("precondition", f"{st.kind} {st.name}: {e}", 3)

    def d_field(self, st):
        p = st.args["p"]
        if self.prime:
            self.env[st.name] = GF(self.prime)
            return
        try:
            self.env[st.name] = QQ if p == 0 else GF(p)
        except ValueError as e:
            self.error("semantic", str(e), st.offset)

    def d_ring(self, st):
        F = self.get(st.args["field"], (type(QQ),), st.offset, "field")
        order = LEX if st.args["order"] == "lex" else GREVLEX
        names = st.args["vars"]
        if len(set(names)) != len(names):
            self.error("semantic", "repeated variable name", st.offset)
        self.env[st.name] = PolyRing(F, names, order)

    def d_qring(self, st):
        if "coproduct" in st.args:
            a, b = st.args["coproduct"]
            A = self.get(a, (QuotientRing,), st.offset, "ring")
            B = self.get(b, (QuotientRing,), st.offset, "ring")
            B0, _, _ = coproduct_ring(A, B, name=st.name)
            self.env[st.name] = B0
            return
        base = self.env[st.args["base"]]
        if isinstance(base, QuotientRing):
            R = base.ambient
            gens = list(base.ideal.gens)
        elif isinstance(base, PolyRing):
            R, gens = base, []
        else:
            self.error("semantic", f"{st.args['base']!r} is not a ring", st.offset)
        gens += [self.poly(R, g) for g in st.args["gens"]]
        self.env[st.name] = QuotientRing(R, gens, name=st.name)

    def d_module(self, st):
        ring = self.get(st.args["ring"], (QuotientRing,), st.offset, "ring")
        g = st.args["gens"]
        rels = self.matrix(ring.ambient, st.args["rels"], g, st.offset, "relations")
        self.env[st.name] = FPModule(ring, g, rels, name=st.name)

    def d_hom(self, st):
        M = self.get(st.args["source"], (FPModule,), st.offset, "module")
        N = self.get(st.args["target"], (FPModule,), st.offset, "module")
        rows = st.args["matrix"]
        if len(rows) != M.ngens:
            self.error("semantic", f"hom {st.name}: need {M.ngens} rows, got {len(rows)}", st.offset)
        self.env[st.name] = ModuleHom(M, N, self.matrix(M.ambient, rows, N.ngens, st.offset, "hom"))

    def d_setup(self, st):
        a = st.args

        def ring(key):
            return self.get(a[key][1], (QuotientRing,), st.offset, "ring")

        B1, B1p, B2 = ring("B1"), ring("B1p"), ring("B2")
        E2 = self.get(a["E2"][1], (FPModule,), st.offset, "module")
        B0, _, _ = coproduct_ring(B1, B2)
        P = B0.ambient
        K = self.get(a["K"][1], (FPModule,), st.offset, "module") if "K" in a else None
        u0 = None
        if "u0" in a:
            kind, val = a["u0"]
            if kind == "word":
                u0 = val
            else:
                u0 = self.matrix(P, val, None, st.offset, "u0")
        if "N0" in a:
            n0 = self.matrix(P, a["N0"][1], E2.ngens, st.offset, "N0")
            F0 = f0 = None
        else:
            F0 = self.get(a["F0"][1], (FPModule,), st.offset, "module")
            kind, val = a["f0"]
            if kind == "name":
                h = self.get(val, (ModuleHom,), st.offset, "hom")
                f0 = [list(r) for r in h.matrix]
            else:
                f0 = self.matrix(P, val, F0.ngens, st.offset, "f0")
            n0 = None
        if K is None and u0 in (None, "id"):
            S = flat_problem(B1, B1p, B2, E2, n0=n0, F0=F0, f0_matrix=f0, name=st.name)
        else:
            S = build_setup(B1, B1p, B2, E2, n0=n0, F0=F0, f0_matrix=f0, K=K, u0=u0, name=st.name)
        self.env[st.name] = S

    # -- commands
    def command(self, st: Stmt) -> list[str]:
        ops = st.args["operands"]
        head = "cmd " + " ".join([st.name] + [str(o[1]) for o in ops])
        try:
            body = getattr(self, "c_" + st.name.replace("-", "_"))(st, ops)
        except orc.CapExceeded as e:
            raise CommandError("cap", f"{st.name}: {e}", 4)
        except PRECONDITION as e:
            raise CommandError("precondition", f"{st.name}: {e}", 3)
        return [head] + body

    def setup_arg(self, op) -> DeformationSetup:
        return self.get(op[1], (DeformationSetup,), op[2], "setup")

    def c_obstruct(self, st, ops) -> list[str]:
        S = self.setup_arg(ops[0])
        rep = elementary_obstruction(S)
        out = [f"field = {S.field}", "route = elementary"]
        out += self._ext_lines(S)
        out.append(f"omega = {fmt_matrix(rep.omega.cocycle)}")
        out.append(f"verdict = {rep.verdict}")
        if rep.vanishes:
            sp = rep.certificate
            out.append("certificate = splitting")
            out.append(f"splitting = {fmt_matrix(sp.section.matrix)}")
            out.append(f"splitting_verified = {fmt_bool(sp.verify())}")
            sol = rep.solution
            out.append(f"solution_gens = {sol.F.ngens}")
            out.append(f"solution_rels = {fmt_matrix(sol.F.rels)}")
            out.append(f"solution_map = {fmt_matrix(sol.f.matrix)}")
            out.append(f"solution_verified = {fmt_bool(sol.verify())}")
            H = S.hom_group
            try:
                out.append(f"hom_dim = {H.k_dimension()}")
                out.append(self._torsor_spot_check(S, sol, H))
            except NotFiniteDimensional:
                out.append("hom_dim = infinite")
        else:
            out.append("certificate = cocycle not a coboundary")
            out.append(f"certificate_verified = {fmt_bool(rep.certificate.verify())}")
        return out

    def _ext_lines(self, S) -> list[str]:
        try:
            return [f"ext_dim = {S.ext_ctx.dimension()}"]
        except NotFiniteDimensional:
            return ["ext_dim = infinite"]

    def _torsor_spot_check(self, S, sol, H: HomModule, draws: int = 3) -> str:
        rng = random.Random(self.seed)
        basis = H.basis_homs()
        F = S.field
        ok = 0
        for _ in range(draws):
            h = zero_hom(S.N0, S.K)
            for b in basis:
                h = h + b.scale(F.random_element(rng, 3))
            s2 = torsor_action(S, sol, h)
            if s2.verify() and torsor_difference(S, s2, sol) == h:
                ok += 1
        return f"torsor_spot_checks = {ok}/{draws} (seed {self.seed})"

    def c_atiyah(self, st, ops) -> list[str]:
        S = self.setup_arg(ops[0])
        out = [f"field = {S.field}", "route = atiyah",
               f"conormal_left_exact = {fmt_bool(S.conormal.left_exact)}"]
        rep = atiyah_obstruction(S)
        out += self._ext_lines(S)
        out.append(f"omega = {fmt_matrix(rep.omega.cocycle)}")
        out.append(f"verdict = {rep.verdict}")
        out += self._class_certificate(rep.omega)
        elem = elementary_obstruction(S)
        out.append(f"elementary_verdict = {elem.verdict}")
        out.append(f"baer_difference_splits = {fmt_bool((elem.omega - rep.omega).is_zero())}")
        return out

    def _class_certificate(self, c) -> list[str]:
        ctx = c.ctx
        phi = ctx.coboundary_preimage(c.cocycle)
        if phi is None:
            return ["certificate = cocycle not a coboundary",
                    f"certificate_verified = {fmt_bool(ctx.is_cocycle(c.cocycle))}"]
        ok = True
        if ctx.nrels:
            img = ctx.delta.apply_coeffs([a for v in phi for a in v])
            ok = ctx.unflatten(img) == ctx.unflatten(ctx.flatten(c.cocycle))
        return ["certificate = coboundary", f"coboundary = {fmt_matrix(phi)}",
                f"certificate_verified = {fmt_bool(ok)}"]

    def _module_arg(self, op) -> FPModule:
        return self.get(op[1], (FPModule,), op[2], "module")

    def c_tangent(self, st, ops) -> list[str]:
        S = self.setup_arg(ops[0])
        point = QuotPoint.from_setup(S)
        if len(ops) > 1:
            I, name = self._module_arg(ops[1]), ops[1][1]
        else:
            I, name = point.residue_field(), "k"
        rep = tangent(point, I)
        out = [f"field = {S.field}", f"module = {name}"]
        if not rep.finite:
            out.append("dimension = infinite")
            return out
        out.append(f"dimension = {rep.dimension}")
        for i, h in enumerate(rep.basis):
            out.append(f"basis[{i}] = {fmt_matrix(h.matrix)}")
        return out

    def c_perfect(self, st, ops) -> list[str]:
        S = self.setup_arg(ops[0])
        point = QuotPoint.from_setup(S)
        if len(ops) > 1:
            mods = [(op[1], self._module_arg(op)) for op in ops[1:]]
        else:
            mods = standard_battery(point.B1)
        p = S.field.characteristic or 2
        rep = perfect_check(point, mods, p=p, cap=orc.candidate_cap(self.cap))
        out = [f"field = {S.field}", f"enumeration_field = GF({p})"]
        for e in rep.entries:
            b = e.betabar
            out.append(f"module = {e.module}")
            if b.level == "k-matrix":
                out.append(f"  betabar = {b.target_dim}x{b.source_dim} {fmt_matrix(b.matrix)}")
                out.append(f"  betabar_rank = {b.rank}")
            else:
                out.append("  betabar = module level over B1")
            out.append(f"  injective = {fmt_bool(b.injective)}")
            out.append(f"  surjective = {fmt_bool(b.surjective)}")
            if e.enumeration is not None:
                en = e.enumeration
                out.append(f"  sections = {en.sections}")
                out.append(f"  solutions = {en.solutions}")
                out.append(f"  section_to_solution_bijective = {fmt_bool(en.bijective)}")
                out.append(f"  checks_agree = {fmt_bool(e.agree)}")
            else:
                out.append(f"  {e.note}")
        out.append(f"partial = {fmt_bool(rep.partial)}")
        out.append(f"verdict = {'perfect on the battery' if rep.perfect else 'not perfect'}")
        out.append(f"consistent = {fmt_bool(rep.consistent)}")
        return out

    def rebuilt(self, p: int, offset: int) -> "Session":
        key = (p, offset)
        s = self._rebuilt.get(key)
        if s is None:
            s = Session(self.script, prime=p, seed=self.seed, cap=self.cap)
            for d in self.script.statements:
                if d.offset >= offset:
                    break
                if d.kind != "cmd":
                    s.declare(d)
            self._rebuilt[key] = s
        return s

    def c_torsor_count(self, st, ops) -> list[str]:
        p = ops[1][1]
        try:
            GF(p)
        except ValueError as e:
            self.error("semantic", str(e), ops[1][2])
        self.setup_arg(ops[0])
        sess = self.rebuilt(p, st.offset)
        S = sess.env[ops[0][1]]
        rep = elementary_obstruction(S)
        out = [f"field = {S.field}", f"verdict = {rep.verdict}"]
        data = orc.lift_data_from_setup(S)
        try:
            block = orc.BlockLiftOracle(data)
        except orc.OracleError as e:
            raise orc.OracleError(f"enumeration oracle needs F0 and K finite over k at the origin ({e})")
        en = block.enumerate(self.cap)
        out.append(f"solutions = {en.count}")
        if rep.vanishes:
            d = S.hom_group.k_dimension()
            out.append(f"hom_dim = {d}")
            law = "holds" if en.count == p ** d else "fails"
            out.append(f"torsor_law = {law} ({en.count} vs {p}^{d})")
        else:
            out.append(f"obstruction_agrees = {fmt_bool(en.count == 0)}")
        out.append(f"oracle = {en.mode}, {en.candidates} candidates")
        return out

    def c_ext1(self, st, ops) -> list[str]:
        M, N = self._module_arg(ops[0]), self._module_arg(ops[1])
        ring = meet_rings(M.ring, N.ring)
        ctx = ext1(M, N, ring)
        out = [f"ring = {ring.name or ring}"]
        try:
            d = ctx.dimension()
        except NotFiniteDimensional:
            out.append("dimension = infinite")
            return out
        out.append(f"dimension = {d}")
        for i, c in enumerate(ctx.basis()):
            out.append(f"basis[{i}] = {fmt_matrix(c.cocycle)}")
        return out

    def c_kahler(self, st, ops) -> list[str]:
        B = self.get(ops[0][1], (QuotientRing,), ops[0][2], "ring")
        K = kahler(B)
        names = [B.ambient.names[i] for i in K.indices]
        out = [f"omega_gens = [{', '.join('d' + n for n in names)}]",
               f"omega_rels = {fmt_matrix(K.module.rels)}"]
        r = K.free_rank()
        out.append(f"omega_rank = {r} (free)" if r is not None else "omega_rank = none (not free)")
        if K.module.is_finite():
            out.append(f"omega_k_dimension = {K.module.k_dimension()}")
        return out


def run_script(script: SessionScript, emit: Callable[[str], None], seed: int = 0, cap: int | None = None) -> int:
    sess = Session(script, seed=seed, cap=cap)
    first = True
    for st in script.statements:
        if st.kind != "cmd":
            sess.declare(st)
            continue
        lines = sess.command(st)
        if not first:
            emit("")
        first = False
        for line in lines:
            emit(line)
    return 0
