"""Text formats for functions, formulas, instances and plan schedules.

    # comments run to the end of the line
    fn H arity 2
    table 2 1 1 2
    formula G(x, z) := sum y . XOR3(x, y, z) * U(y)
    instance I over a b c := IMP(a, b) * IMP(b, c)
    schedule G eps 1/1024 k 11 exact false

Table entries are integers or p/q rationals in the package's index order
(x_1 is the least significant bit).  ``1`` stands for the empty product and
a nullary atom is written ``HALF()``.  Statements may span lines; each one
starts with a keyword.  Instances without an ``over`` clause range over the
variables of their atoms in order of first appearance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .core import FnTable
from .errors import CloneError, ParseError
from .formula import Atom, CspInstance, PpsFormula

KEYWORDS = ("fn", "table", "formula", "instance", "schedule")
_RESERVED_WORDS = set(KEYWORDS) | {"sum", "over"}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<assign>:=)
  | (?P<num>-?\d+(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_@']*)
  | (?P<punct>[(),.*])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, source: str = "<input>") -> list[Token]:
    out, line, start, pos = [], 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1, source)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


@dataclass(frozen=True)
class Schedule:
    eps: Fraction
    k: int
    exact: bool


@dataclass
class Workspace:
    """Named objects loaded from text; names are unique across all kinds."""

    functions: dict[str, FnTable] = field(default_factory=dict)
    formulas: dict[str, PpsFormula] = field(default_factory=dict)
    instances: dict[str, CspInstance] = field(default_factory=dict)
    schedules: dict[str, Schedule] = field(default_factory=dict)

    def names(self) -> set[str]:
        return set(self.functions) | set(self.formulas) | set(self.instances)

    def add(self, kind: str, name: str, obj) -> None:
        if kind == "schedules":
            if name in self.schedules:
                raise CloneError(f"duplicate schedule for {name!r}")
        elif name in self.names():
            raise CloneError(f"duplicate definition of {name!r}")
        getattr(self, kind)[name] = obj

    def merge(self, other: "Workspace") -> None:
        for kind in ("functions", "formulas", "instances", "schedules"):
            for name, obj in getattr(other, kind).items():
                self.add(kind, name, obj)

    def env(self) -> dict[str, FnTable]:
        return dict(self.functions)


class _Parser:
    def __init__(self, text: str, source: str):
        self.source = source
        self.toks = tokenize(text, source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.column, self.source)

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            got = t.text or "end of input"
            raise self.error(f"expected {want!r}, found {got!r}")
        return self.next()

    def name(self, what: str) -> Token:
        t = self.tok
        if t.kind != "name" or t.text in _RESERVED_WORDS:
            raise self.error(f"expected {what}, found {t.text or 'end of input'!r}")
        return self.next()

    def at_keyword(self) -> bool:
        return self.tok.kind == "eof" or (self.tok.kind == "name" and self.tok.text in KEYWORDS)

    def integer(self) -> int:
        t = self.expect("num")
        if "/" in t.text or t.text.startswith("-"):
            raise self.error("expected a nonnegative integer", t)
        return int(t.text)

    # -- statements --

    def parse(self) -> Workspace:
        ws = Workspace()
        while self.tok.kind != "eof":
            t = self.tok
            if not (t.kind == "name" and t.text in KEYWORDS) or t.text == "table":
                raise self.error(f"expected a statement keyword, found {t.text!r}")
            self.next()
            try:
                if t.text == "fn":
                    ws.add("functions", *self.function())
                elif t.text == "formula":
                    ws.add("formulas", *self.formula())
                elif t.text == "instance":
                    ws.add("instances", *self.instance())
                else:
                    ws.add("schedules", *self.schedule())
            except ParseError:
                raise
            except (CloneError, ValueError) as exc:
                raise self.error(str(exc), t) from exc
        return ws

    def function(self):
        name = self.name("a function name")
        self.expect("name", "arity")
        arity = self.integer()
        self.expect("name", "table")
        start = self.tok
        values = []
        while not self.at_keyword():
            values.append(Fraction(self.expect("num").text))
        try:
            table = FnTable(arity, values)
        except (CloneError, ValueError) as exc:
            raise self.error(str(exc), start) from exc
        return name.text, table

    def variables_until(self, stop: set[str]) -> list[str]:
        out = []
        while not (self.tok.kind in ("assign", "punct") and self.tok.text in stop):
            out.append(self.name("a variable").text)
        return out

    def atoms(self) -> list[Atom]:
        if self.tok.kind == "num" and self.tok.text == "1":
            self.next()
            return []
        out = [self.atom()]
        while self.tok.kind == "punct" and self.tok.text == "*":
            self.next()
            out.append(self.atom())
        return out

    def atom(self) -> Atom:
        fn = self.name("a function name").text
        self.expect("punct", "(")
        scope = []
        if not (self.tok.kind == "punct" and self.tok.text == ")"):
            scope.append(self.name("a variable").text)
            while self.tok.kind == "punct" and self.tok.text == ",":
                self.next()
                scope.append(self.name("a variable").text)
        self.expect("punct", ")")
        return Atom(fn, scope)

    def formula(self):
        name = self.name("a formula name").text
        self.expect("punct", "(")
        free = []
        if not (self.tok.kind == "punct" and self.tok.text == ")"):
            free.append(self.name("a variable").text)
            while self.tok.kind == "punct" and self.tok.text == ",":
                self.next()
                free.append(self.name("a variable").text)
        self.expect("punct", ")")
        head = self.expect("assign")
        bound = []
        if self.tok.kind == "name" and self.tok.text == "sum":
            self.next()
            bound = self.variables_until({"."})
            self.expect("punct", ".")
        atoms = self.atoms()
        self.end_of_statement()
        psi = PpsFormula(free, bound, atoms)
        try:
            psi.validate()
        except CloneError as exc:
            raise self.error(str(exc), head) from exc
        return name, psi

    def instance(self):
        name = self.name("an instance name").text
        variables = None
        if self.tok.kind == "name" and self.tok.text == "over":
            self.next()
            variables = self.variables_until({":="})
        head = self.expect("assign")
        atoms = self.atoms()
        self.end_of_statement()
        if variables is None:
            variables = list(dict.fromkeys(v for a in atoms for v in a.scope))
        inst = CspInstance(variables, atoms)
        try:
            inst.validate()
        except CloneError as exc:
            raise self.error(str(exc), head) from exc
        return name, inst

    def schedule(self):
        name = self.name("a plan name").text
        self.expect("name", "eps")
        eps = Fraction(self.expect("num").text)
        self.expect("name", "k")
        k = self.integer()
        self.expect("name", "exact")
        flag = self.expect("name")
        if flag.text not in ("true", "false"):
            raise self.error("expected true or false", flag)
        self.end_of_statement()
        return name, Schedule(eps, k, flag.text == "true")

    def end_of_statement(self) -> None:
        if not self.at_keyword():
            raise self.error(f"unexpected {self.tok.text!r}")


def parse(text: str, source: str = "<input>") -> Workspace:
    return _Parser(text, source).parse()


def load(*paths) -> Workspace:
    ws = Workspace()
    for p in paths:
        with open(p, encoding="utf-8") as fh:
            ws.merge(parse(fh.read(), str(p)))
    return ws


# --- serialisation ------------------------------------------------------------

def format_function(name: str, f: FnTable) -> str:
    return f"fn {name} arity {f.arity}\ntable {' '.join(str(v) for v in f.values)}\n"


def _body(atoms) -> str:
    return " * ".join(f"{a.fn}({', '.join(a.scope)})" for a in atoms) or "1"


def format_formula(name: str, psi: PpsFormula) -> str:
    head = f"formula {name}({', '.join(psi.free)}) :="
    if psi.bound:
        head += f" sum {' '.join(psi.bound)} ."
    return f"{head} {_body(psi.atoms)}\n"


def format_instance(name: str, inst: CspInstance) -> str:
    over = f" over {' '.join(inst.variables)}" if inst.variables else " over"
    return f"instance {name}{over} := {_body(inst.atoms)}\n"


def format_schedule(name: str, s: Schedule) -> str:
    return f"schedule {name} eps {s.eps} k {s.k} exact {'true' if s.exact else 'false'}\n"


def dumps(ws: Workspace) -> str:
    parts: list[str] = []
    parts += [format_function(n, f) for n, f in ws.functions.items()]
    parts += [format_formula(n, p) for n, p in ws.formulas.items()]
    parts += [format_instance(n, i) for n, i in ws.instances.items()]
    parts += [format_schedule(n, s) for n, s in ws.schedules.items()]
    return "".join(parts)


def iter_targets(ws: Workspace) -> Iterator[tuple[str, object]]:
    yield from ws.formulas.items()
    yield from ws.instances.items()
