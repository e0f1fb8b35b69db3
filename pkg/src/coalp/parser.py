"""Reader for the clause language.

Grammar (LL(1))::

    program  := clause*
    clause   := atom [":-" atom ("," atom)*] "."
    goal     := ["?-"] atom ("," atom)* "."
    atom     := name ["(" term ("," term)* ")"]
    term     := VAR | name ["(" term ("," term)* ")"]
    name     := LOWER_IDENT | NUMBER | QUOTED | UPPER_IDENT immediately followed by "("

Variables start with an uppercase letter or ``_``.  An uppercase
identifier written directly before ``(`` is read as a symbol, which is how
programs such as ``T(X,c) :- Q(X).`` are written.  A bare ``_`` is an
anonymous variable; each occurrence is distinct.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .terms import Atom, Clause, Goal, Struct, Var


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self):
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(ValueError):
    """Raised for rejected input; ``diagnostics`` holds at least one positioned entry."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(map(str, self.diagnostics)))


class NotAtomicGoal(ParseError):
    """The goal parsed but is not the single atom the derivation engines need."""


@dataclass
class Program:
    clauses: list[Clause] = field(default_factory=list)

    @property
    def predicates(self) -> dict[str, int]:
        return _signature(self.clauses)[0]

    @property
    def functions(self) -> dict[str, int]:
        return _signature(self.clauses)[1]

    @property
    def ground(self) -> bool:
        return all(c.ground for c in self.clauses)

    def __len__(self):
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __getitem__(self, i):
        return self.clauses[i]

    def __str__(self):
        return "".join(f"{c}\n" for c in self.clauses)


def _signature(clauses) -> tuple[dict, dict]:
    preds: dict[str, int] = {}
    funcs: dict[str, int] = {}

    def walk(t):
        if isinstance(t, Struct):
            funcs.setdefault(t.functor, len(t.args))
            for a in t.args:
                walk(a)

    for c in clauses:
        for a in (c.head,) + c.body:
            preds.setdefault(a.pred, len(a.args))
            for t in a.args:
                walk(t)
    return preds, funcs


# -- lexer ------------------------------------------------------------------

_PUNCT = {"(", ")", ",", "."}


@dataclass
class _Tok:
    kind: str  # name | var | punct | neck | query | eof
    text: str
    line: int
    col: int
    before_paren: bool = False


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def err(msg, l=None, c=None):
        raise ParseError([ParseDiagnostic(l or line, c or col, msg)])

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_" or ch.isdigit():
            j = i
            if ch.isdigit():
                while j < n and text[j].isdigit():
                    j += 1
            else:
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
            word = text[i:j]
            if not word.isascii():
                err(f"non-ASCII identifier {word!r}")
            paren = j < n and text[j] == "("
            if ch.isupper() or ch == "_":
                kind = "name" if paren and ch != "_" else "var"
            else:
                kind = "name"
            toks.append(_Tok(kind, word, start_line, start_col, paren))
            col += j - i
            i = j
            continue
        if ch == "'":
            j = i + 1
            buf = []
            while True:
                if j >= n or text[j] == "\n":
                    err("unterminated quoted atom", start_line, start_col)
                c = text[j]
                if c == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                    continue
                if c == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        buf.append("'")
                        j += 2
                        continue
                    j += 1
                    break
                buf.append(c)
                j += 1
            if not buf:
                err("empty quoted atom", start_line, start_col)
            paren = j < n and text[j] == "("
            toks.append(_Tok("name", "".join(buf), start_line, start_col, paren))
            col += j - i
            i = j
            continue
        if text.startswith(":-", i):
            toks.append(_Tok("neck", ":-", line, col))
            i += 2
            col += 2
            continue
        if text.startswith("?-", i):
            toks.append(_Tok("query", "?-", line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            toks.append(_Tok("punct", ch, line, col))
            i += 1
            col += 1
            continue
        err(f"unexpected character {ch!r}")
    toks.append(_Tok("eof", "", line, col))
    return toks


# -- parser -----------------------------------------------------------------


MAX_NESTING = 400  # keeps the recursive term functions well inside the stack limit


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.pos = 0
        self.anon = 0
        self.depth = 0
        self.preds: dict[str, tuple[int, int, int]] = {}
        self.funcs: dict[str, tuple[int, int, int]] = {}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.pos]

    def fail(self, msg: str, tok: Optional[_Tok] = None):
        t = tok or self.tok
        raise ParseError([ParseDiagnostic(t.line, t.col, msg)])

    def expect(self, text: str):
        t = self.tok
        if t.kind == "eof":
            self.fail(f"expected {text!r} but input ended")
        if t.text != text or t.kind not in ("punct", "neck"):
            self.fail(f"expected {text!r}, found {t.text!r}")
        self.pos += 1

    def check_arity(self, table, kind, name, arity, tok):
        prev = table.get(name)
        if prev is None:
            table[name] = (arity, tok.line, tok.col)
        elif prev[0] != arity:
            self.fail(
                f"arity conflict for {kind} {name}: used as {name}/{prev[0]} "
                f"(line {prev[1]}) and {name}/{arity}",
                tok,
            )

    def args(self) -> list:
        out = []
        if self.tok.text == "(" and self.tok.kind == "punct":
            self.pos += 1
            out.append(self.term())
            while self.tok.text == "," and self.tok.kind == "punct":
                self.pos += 1
                out.append(self.term())
            self.expect(")")
        return out

    def term(self):
        t = self.tok
        if t.kind == "var":
            self.pos += 1
            if t.text == "_":
                self.anon += 1
                return Var(f"_G{self.anon}")
            return Var(t.text)
        if t.kind == "name":
            self.pos += 1
            self.depth += 1
            if self.depth > MAX_NESTING:
                self.fail(f"terms nested deeper than {MAX_NESTING} levels", t)
            args = self.args()
            self.depth -= 1
            self.check_arity(self.funcs, "function symbol", t.text, len(args), t)
            return Struct(t.text, args)
        if t.kind == "eof":
            self.fail("expected a term but input ended")
        self.fail(f"expected a term, found {t.text!r}")

    def atom(self) -> Atom:
        t = self.tok
        if t.kind != "name":
            if t.kind == "var":
                self.fail(f"expected an atom, found variable {t.text!r}")
            if t.kind == "eof":
                self.fail("expected an atom but input ended")
            self.fail(f"expected an atom, found {t.text!r}")
        self.pos += 1
        args = self.args()
        self.check_arity(self.preds, "predicate", t.text, len(args), t)
        return Atom(t.text, args)

    def conj(self) -> list[Atom]:
        out = [self.atom()]
        while self.tok.text == "," and self.tok.kind == "punct":
            self.pos += 1
            out.append(self.atom())
        return out

    def clause(self) -> Clause:
        head = self.atom()
        body: list[Atom] = []
        if self.tok.kind == "neck":
            self.pos += 1
            body = self.conj()
        self.expect(".")
        return Clause(head, body)

    def program(self) -> Program:
        clauses = []
        while self.tok.kind != "eof":
            clauses.append(self.clause())
        return Program(clauses)

    def goal(self) -> Goal:
        if self.tok.kind == "query":
            self.pos += 1
        atoms = self.conj()
        self.expect(".")
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r} after the goal")
        return Goal(atoms)


def parse_program(text: str) -> Program:
    """Parse program text; raise ``ParseError`` with positioned diagnostics on failure."""
    return _Parser(text).program()


def parse_goal(text: str, program: Optional[Program] = None) -> Goal:
    """Parse a goal such as ``?- btree(X).``; the ``?-`` and trailing ``.`` are optional/required respectively.

    When ``program`` is given, arities are checked against its signature too.
    """
    p = _Parser(text)
    if program is not None:
        preds, funcs = _signature(program.clauses)
        p.preds = {k: (v, 0, 0) for k, v in preds.items()}
        p.funcs = {k: (v, 0, 0) for k, v in funcs.items()}
    return p.goal()


def parse_atomic_goal(text: str, program: Optional[Program] = None) -> Atom:
    """Parse a goal and require it to be a single atom (the derivation engines' input)."""
    g = parse_goal(text, program)
    if len(g.atoms) != 1:
        first = _lex(text)[0]
        raise NotAtomicGoal([ParseDiagnostic(
            first.line, first.col,
            f"the derivation engines need a single-atom goal, got {len(g.atoms)} atoms",
        )])
    return g.atoms[0]


def parse_term(text: str):
    """Parse a single term (no trailing dot)."""
    p = _Parser(text)
    t = p.term()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r} after the term")
    return t


def parse_atom(text: str) -> Atom:
    """Parse a single atom (trailing dot optional)."""
    p = _Parser(text)
    a = p.atom()
    if p.tok.kind == "punct" and p.tok.text == ".":
        p.pos += 1
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r} after the atom")
    return a
