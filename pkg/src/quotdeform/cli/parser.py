"""Session scripts: a small declaration language for rings, modules and
lifting problems, followed by commands."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..poly.field import QQ
from ..poly.ring import PolyRing, PolynomialSyntaxError


class ScriptError(ValueError):
    """Syntax or semantic error with a location in the script."""

    def __init__(self, category: str, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.category = category
        self.message = message
        self.line = line
        self.col = col


@dataclass
class Poly:
    """Polynomial source text and its offset in the script."""
    text: str
    offset: int


@dataclass
class Stmt:
    kind: str
    name: str
    args: dict
    offset: int
    line: int = 0
    col: int = 0


@dataclass
class SessionScript:
    statements: list = field(default_factory=list)
    source: str = ""

    @property
    def declarations(self) -> list:
        return [s for s in self.statements if s.kind != "cmd"]

    @property
    def commands(self) -> list:
        return [s for s in self.statements if s.kind == "cmd"]

    def locate(self, offset: int) -> tuple[int, int]:
        return locate(self.source, offset)


def locate(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


COMMANDS = ("obstruct", "atiyah", "tangent", "perfect", "torsor-count", "ext1", "kahler")
SETUP_KEYS = ("B1", "B1p", "B2", "E2", "N0", "F0", "f0", "K", "u0")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")
_INT = re.compile(r"[0-9]+")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.seen: dict[str, int] = {}

    # -- low level
    def error(self, msg: str, offset: int | None = None, category: str = "syntax"):
        off = self.pos if offset is None else offset
        line, col = locate(self.text, off)
        raise ScriptError(category, msg, line, col)

    def skip(self):
        t = self.text
        while self.pos < len(t):
            c = t[self.pos]
            if c in " \t\r\n":
                self.pos += 1
            elif c == "#":
                nl = t.find("\n", self.pos)
                self.pos = len(t) if nl < 0 else nl + 1
            else:
                break

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        self.skip()
        if not self.text.startswith(s, self.pos):
            found = self.text[self.pos:self.pos + 12].split("\n")[0] or "end of input"
            self.error(f"expected {s!r}, found {found!r}")
        self.pos += len(s)

    def keyword(self, s: str) -> bool:
        self.skip()
        m = _WORD.match(self.text, self.pos)
        if m and m.group(0) == s:
            self.pos = m.end()
            return True
        return False

    def ident(self, what: str = "name") -> tuple[str, int]:
        self.skip()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            self.error(f"expected {what}")
        self.pos = m.end()
        return m.group(0), m.start()

    def word(self) -> tuple[str, int]:
        self.skip()
        m = _WORD.match(self.text, self.pos)
        if not m:
            self.error("expected a word")
        self.pos = m.end()
        return m.group(0), m.start()

    def integer(self) -> int:
        self.skip()
        m = _INT.match(self.text, self.pos)
        if not m:
            self.error("expected an integer")
        self.pos = m.end()
        return int(m.group(0))

    def raw(self, stops: str) -> Poly:
        """Text up to a stop character at bracket depth 0."""
        self.skip()
        start = self.pos
        depth = 0
        t = self.text
        while self.pos < len(t):
            c = t[self.pos]
            if c == "#":
                break
            if depth == 0 and c in stops:
                break
            if c in "([":
                depth += 1
            elif c in ")]":
                if depth == 0:
                    break
                depth -= 1
            elif c in ";{}":
                break
            self.pos += 1
        s = t[start:self.pos]
        stripped = s.strip()
        if not stripped:
            self.error("expected a polynomial", start)
        lead = len(s) - len(s.lstrip())
        poly = Poly(stripped, start + lead)
        self.check_poly(poly)
        return poly

    def check_poly(self, poly: Poly):
        names = sorted(set(_IDENT.findall(poly.text)))
        try:
            PolyRing(QQ, names or ["_"]).parse(poly.text)
        except PolynomialSyntaxError as e:
            self.error(e.detail, poly.offset + (e.position or 0))

    def poly_list(self, close: str) -> list[Poly]:
        out = []
        if self.peek(close):
            return out
        while True:
            out.append(self.raw("," + close))
            if self.peek(","):
                self.expect(",")
                continue
            return out

    def matrix(self) -> list[list[Poly]]:
        self.expect("[")
        rows = []
        if self.peek("]"):
            self.expect("]")
            return rows
        while True:
            self.expect("[")
            rows.append(self.poly_list("]"))
            self.expect("]")
            if self.peek(","):
                self.expect(",")
                continue
            self.expect("]")
            return rows

    def end(self):
        self.expect(";")

    def define(self, name: str, offset: int):
        if name in self.seen:
            self.error(f"name {name!r} is already defined", offset, "semantic")
        self.seen[name] = offset

    def use(self, name: str, offset: int):
        if name not in self.seen:
            self.error(f"unknown name {name!r}", offset, "semantic")

    # -- statements
    def statement(self) -> Stmt:
        kw, off = self.word()
        handler = {
            "field": self.s_field, "ring": self.s_ring, "qring": self.s_qring, "module": self.s_module,
            "hom": self.s_hom, "setup": self.s_setup, "cmd": self.s_cmd,
        }.get(kw)
        if handler is None:
            self.error(f"unknown statement {kw!r}", off)
        st = handler(off)
        st.line, st.col = locate(self.text, off)
        return st

    def s_field(self, off) -> Stmt:
        name, noff = self.ident()
        self.expect("=")
        if self.keyword("QQ"):
            args = {"p": 0}
        elif self.keyword("GF"):
            self.expect("(")
            args = {"p": self.integer()}
            self.expect(")")
        else:
            self.error("expected QQ or GF(p)")
        self.end()
        self.define(name, noff)
        return Stmt("field", name, args, off)

    def s_ring(self, off) -> Stmt:
        name, noff = self.ident()
        self.expect("=")
        fld, foff = self.ident("field name")
        self.use(fld, foff)
        self.expect("[")
        names = []
        if not self.peek("]"):
            while True:
                v, _ = self.ident("variable")
                names.append(v)
                if self.peek(","):
                    self.expect(",")
                    continue
                break
        self.expect("]")
        order = "grevlex"
        if self.keyword("order"):
            order, ooff = self.word()
            if order not in ("grevlex", "lex"):
                self.error(f"unknown monomial order {order!r}", ooff)
        self.end()
        self.define(name, noff)
        return Stmt("ring", name, {"field": fld, "vars": names, "order": order}, off)

    def s_qring(self, off) -> Stmt:
        name, noff = self.ident()
        self.expect("=")
        base, boff = self.ident("ring name")
        self.use(base, boff)
        if self.peek("(x)"):
            self.expect("(x)")
            other, ooff = self.ident("ring name")
            self.use(other, ooff)
            self.end()
            self.define(name, noff)
            return Stmt("qring", name, {"coproduct": (base, other)}, off)
        self.expect("/")
        self.expect("(")
        gens = self.poly_list(")")
        self.expect(")")
        self.end()
        self.define(name, noff)
        return Stmt("qring", name, {"base": base, "gens": gens}, off)

    def s_module(self, off) -> Stmt:
        name, noff = self.ident()
        if not self.keyword("over"):
            self.error("expected 'over'")
        ring, roff = self.ident("ring name")
        self.use(ring, roff)
        self.expect("=")
        if not self.keyword("gens"):
            self.error("expected 'gens'")
        g = self.integer()
        rels = []
        if self.keyword("rels"):
            rels = self.matrix()
        self.end()
        self.define(name, noff)
        return Stmt("module", name, {"ring": ring, "gens": g, "rels": rels}, off)

    def s_hom(self, off) -> Stmt:
        name, noff = self.ident()
        self.expect(":")
        src, soff = self.ident("module name")
        self.use(src, soff)
        self.expect("->")
        tgt, toff = self.ident("module name")
        self.use(tgt, toff)
        self.expect("=")
        mat = self.matrix()
        self.end()
        self.define(name, noff)
        return Stmt("hom", name, {"source": src, "target": tgt, "matrix": mat}, off)

    def s_setup(self, off) -> Stmt:
        name, noff = self.ident()
        self.expect("=")
        self.expect("{")
        args: dict = {}
        while not self.peek("}"):
            key, koff = self.ident("setup key")
            if key not in SETUP_KEYS:
                self.error(f"unknown setup key {key!r}", koff)
            if key in args:
                self.error(f"duplicate setup key {key!r}", koff, "semantic")
            self.expect("=")
            if key in ("N0", "f0") and self.peek("["):
                args[key] = ("matrix", self.matrix())
            elif key == "u0" and self.peek("["):
                args[key] = ("matrix", self.matrix())
            else:
                val, voff = self.ident("name")
                if key == "u0" and val in ("id", "zero"):
                    args[key] = ("word", val)
                else:
                    self.use(val, voff)
                    args[key] = ("name", val)
            if self.peek(","):
                self.expect(",")
        self.expect("}")
        self.end()
        for k in ("B1", "B1p", "B2", "E2"):
            if k not in args:
                self.error(f"setup {name!r} needs {k}", off, "semantic")
        if "N0" not in args and not ("F0" in args and "f0" in args):
            self.error(f"setup {name!r} needs N0, or F0 and f0", off, "semantic")
        self.define(name, noff)
        return Stmt("setup", name, args, off)

    def s_cmd(self, off) -> Stmt:
        cmd, coff = self.word()
        if cmd not in COMMANDS:
            self.error(f"unknown command {cmd!r}", coff)
        operands = []
        while not self.peek(";"):
            if self.at_end():
                self.error("expected ';'")
            self.skip()
            m = _INT.match(self.text, self.pos)
            if m:
                operands.append(("int", int(m.group(0)), m.start()))
                self.pos = m.end()
                continue
            val, voff = self.ident("operand")
            self.use(val, voff)
            operands.append(("name", val, voff))
        self.end()
        arity = {"obstruct": (1, 1), "atiyah": (1, 1), "tangent": (1, 2), "perfect": (1, 99),
                 "torsor-count": (2, 2), "ext1": (2, 2), "kahler": (1, 1)}[cmd]
        if not arity[0] <= len(operands) <= arity[1]:
            self.error(f"{cmd} takes {arity[0]}" + (f" to {arity[1]}" if arity[1] != arity[0] and arity[1] < 99
                                                     else " or more" if arity[1] == 99 else "")
                       + " operands", coff, "semantic")
        if cmd == "torsor-count" and operands[1][0] != "int":
            self.error("torsor-count needs a prime", operands[1][2], "semantic")
        return Stmt("cmd", cmd, {"operands": operands}, off)


def parse(text: str) -> SessionScript:
    p = _Parser(text)
    script = SessionScript(source=text)
    while not p.at_end():
        script.statements.append(p.statement())
    return script
