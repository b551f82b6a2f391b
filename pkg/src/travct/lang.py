"""Abstract syntax, parser and printer for the array-traversal WHILE language.

Grammar (whitespace-insensitive between tokens)::

    program := "trav" "(" ident "," ident ")" "{" stmt "}"
    stmt    := "for" ident "in" "[" expr ":" expr "]" "do" stmt
             | "!" ident "[" expr "]"
    expr    := term (("+" | "-") term)*
    term    := intlit | ident
    intlit  := "-"? digit+

The first header parameter names the array, the second its size.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

MAX_CONST = 2**31 - 1

KEYWORDS = frozenset({"trav", "for", "in", "do"})

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


Expr = Union[IntConst, Var, Add, Sub]


@dataclass(frozen=True)
class HeapRead:
    """``!a[index]``: a bounds-checked read whose value is discarded."""

    array: str
    index: Expr


@dataclass(frozen=True)
class ForRange:
    """``for v in [lo : hi] do body``; both bounds inclusive."""

    loop_var: str
    lo: Expr
    hi: Expr
    body: tuple["Stmt", ...]


Stmt = Union[HeapRead, ForRange]


@dataclass(frozen=True)
class Program:
    array_param: str
    size_param: str
    body: tuple[Stmt, ...]

    def __post_init__(self):
        check_well_formed(self)


@dataclass(frozen=True)
class TravInstance:
    """The program ``for i in [L : s-R] do !a[i+Z]``."""

    L: int
    R: int
    Z: int

    def __post_init__(self):
        for name in ("L", "R", "Z"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(f"{name} must be an int, got {value!r}")
            if abs(value) > MAX_CONST:
                raise ValueError(f"|{name}| exceeds {MAX_CONST}")

    def __str__(self):
        return f"trav_{{{self.L},{self.R}}}^{{{self.Z}}}"

    def upper_expr(self, size: str = "s") -> Expr:
        """``s-R`` with the sign folded into the operator."""
        if self.R >= 0:
            return Sub(Var(size), IntConst(self.R))
        return Add(Var(size), IntConst(-self.R))

    def index_expr(self, loop_var: str = "i") -> Expr:
        """``i+Z`` with the sign folded into the operator."""
        if self.Z >= 0:
            return Add(Var(loop_var), IntConst(self.Z))
        return Sub(Var(loop_var), IntConst(-self.Z))

    def program(self, array: str = "a", size: str = "s", loop_var: str = "i") -> Program:
        loop = ForRange(loop_var, IntConst(self.L), self.upper_expr(size),
                        (HeapRead(array, self.index_expr(loop_var)),))
        return Program(array, size, (loop,))


@dataclass(frozen=True)
class NotTravPattern:
    """Returned by :func:`recognize_trav` when a program is outside the class."""

    reason: str

    def __bool__(self):
        return False


# ---------------------------------------------------------------------------
# Errors and well-formedness

class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int,
                 expected: frozenset[str] = frozenset()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        text = f"{line}:{column}: {message}"
        if self.expected:
            text += " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(text)


class IllFormedProgram(ValueError):
    pass


def is_identifier(name: object) -> bool:
    return isinstance(name, str) and bool(_IDENT_RE.match(name)) and name not in KEYWORDS


def free_vars(e: Expr) -> set[str]:
    if isinstance(e, IntConst):
        return set()
    if isinstance(e, Var):
        return {e.name}
    return free_vars(e.left) | free_vars(e.right)


def constants(e: Expr) -> Iterator[int]:
    if isinstance(e, IntConst):
        yield e.value
    elif isinstance(e, (Add, Sub)):
        yield from constants(e.left)
        yield from constants(e.right)


def check_well_formed(p: Program) -> None:
    """Raise :class:`IllFormedProgram` unless ``p`` obeys the static rules.

    Index and bound expressions may mention only the size parameter and
    enclosing loop variables; a loop variable may not reuse any name
    already in scope.
    """
    for name in (p.array_param, p.size_param):
        if not is_identifier(name):
            raise IllFormedProgram(f"invalid identifier {name!r}")
    if p.array_param == p.size_param:
        raise IllFormedProgram("array and size parameters must be distinct")

    def check_expr(e, scope):
        if isinstance(e, IntConst):
            if not isinstance(e.value, int) or abs(e.value) > MAX_CONST:
                raise IllFormedProgram(f"constant {e.value!r} out of range")
        elif isinstance(e, Var):
            if e.name not in scope:
                raise IllFormedProgram(f"unbound variable {e.name!r}")
        elif isinstance(e, (Add, Sub)):
            check_expr(e.left, scope)
            check_expr(e.right, scope)
        else:
            raise IllFormedProgram(f"not an expression: {e!r}")

    def check_body(body, scope, names):
        if not isinstance(body, tuple) or not body:
            raise IllFormedProgram("statement lists must be nonempty tuples")
        for stmt in body:
            if isinstance(stmt, HeapRead):
                if stmt.array != p.array_param:
                    raise IllFormedProgram(f"unknown array {stmt.array!r}")
                check_expr(stmt.index, scope)
            elif isinstance(stmt, ForRange):
                if not is_identifier(stmt.loop_var):
                    raise IllFormedProgram(f"invalid identifier {stmt.loop_var!r}")
                if stmt.loop_var in names:
                    raise IllFormedProgram(f"loop variable {stmt.loop_var!r} shadows a name in scope")
                check_expr(stmt.lo, scope)
                check_expr(stmt.hi, scope)
                check_body(stmt.body, scope | {stmt.loop_var}, names | {stmt.loop_var})
            else:
                raise IllFormedProgram(f"not a statement: {stmt!r}")

    check_body(p.body, frozenset({p.size_param}),
               frozenset({p.size_param, p.array_param}))


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[()\[\]{},:!+\-])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "kw", "punct", "eof"
    text: str
    line: int
    column: int

    def describe(self):
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        column = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, column)
        kind = m.lastgroup
        text = m.group()
        if kind == "ws":
            newlines = text.count("\n")
            if newlines:
                line += newlines
                line_start = pos + text.rindex("\n") + 1
        else:
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, text, line, column))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def fail(self, expected, message=None):
        tok = self.tok
        raise ParseError(message or f"unexpected {tok.describe()}",
                         tok.line, tok.column, frozenset(expected))

    def expect(self, text):
        if self.tok.kind in ("punct", "kw") and self.tok.text == text:
            self.pos += 1
            return
        self.fail({text})

    def at(self, text):
        return self.tok.kind in ("punct", "kw") and self.tok.text == text

    def ident(self) -> str:
        tok = self.tok
        if tok.kind != "ident":
            self.fail({"identifier"})
        self.pos += 1
        return tok.text

    def program(self) -> Program:
        self.expect("trav")
        self.expect("(")
        array = self.ident()
        self.expect(",")
        size_tok = self.tok
        size = self.ident()
        if size == array:
            raise ParseError("size parameter must differ from array parameter",
                             size_tok.line, size_tok.column)
        self.expect(")")
        self.expect("{")
        stmt = self.stmt(array, frozenset({size}), frozenset({array, size}))
        self.expect("}")
        if self.tok.kind != "eof":
            self.fail({"end of input"})
        return Program(array, size, (stmt,))

    def stmt(self, array, scope, names) -> Stmt:
        if self.at("for"):
            self.pos += 1
            var_tok = self.tok
            var = self.ident()
            if var in names:
                raise ParseError(f"loop variable {var!r} shadows a name in scope",
                                 var_tok.line, var_tok.column)
            self.expect("in")
            self.expect("[")
            lo = self.expr(scope)
            self.expect(":")
            hi = self.expr(scope)
            self.expect("]")
            self.expect("do")
            body = self.stmt(array, scope | {var}, names | {var})
            return ForRange(var, lo, hi, (body,))
        if self.at("!"):
            self.pos += 1
            arr_tok = self.tok
            name = self.ident()
            if name != array:
                raise ParseError(f"unknown array {name!r}", arr_tok.line, arr_tok.column)
            self.expect("[")
            index = self.expr(scope)
            self.expect("]")
            return HeapRead(name, index)
        self.fail({"for", "!"})

    def expr(self, scope) -> Expr:
        e = self.term(scope)
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.pos += 1
            rhs = self.term(scope)
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self, scope) -> Expr:
        start = self.tok
        negative = False
        if self.at("-"):
            negative = True
            self.pos += 1
            if self.tok.kind != "int":
                self.fail({"integer literal"})
        tok = self.tok
        if tok.kind == "int":
            self.pos += 1
            value = -int(tok.text) if negative else int(tok.text)
            if abs(value) > MAX_CONST:
                raise ParseError(f"integer literal {value} exceeds magnitude bound {MAX_CONST}",
                                 start.line, start.column)
            return IntConst(value)
        if tok.kind == "ident":
            if tok.text not in scope:
                raise ParseError(f"unbound variable {tok.text!r}", tok.line, tok.column)
            self.pos += 1
            return Var(tok.text)
        self.fail({"integer literal", "identifier"})


def parse(source: str) -> Program:
    """Parse program text; raises :class:`ParseError` on any deviation."""
    return _Parser(source).program()


def parse_expr(source: str, scope=("s", "i")) -> Expr:
    parser = _Parser(source)
    e = parser.expr(frozenset(scope))
    if parser.tok.kind != "eof":
        parser.fail({"+", "-", "end of input"})
    return e


# ---------------------------------------------------------------------------
# Printer

def render_expr(e: Expr) -> str:
    if isinstance(e, IntConst):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, (Add, Sub)):
        if not isinstance(e.right, (IntConst, Var)):
            raise IllFormedProgram("right operand must be a literal or variable to be printable")
        op = "+" if isinstance(e, Add) else "-"
        return f"{render_expr(e.left)}{op}{render_expr(e.right)}"
    raise IllFormedProgram(f"not an expression: {e!r}")


def render_stmt(s: Stmt) -> str:
    if isinstance(s, HeapRead):
        return f"!{s.array}[{render_expr(s.index)}]"
    if len(s.body) != 1:
        raise IllFormedProgram("concrete syntax admits exactly one statement per loop body")
    return (f"for {s.loop_var} in [{render_expr(s.lo)} : {render_expr(s.hi)}] do "
            f"{render_stmt(s.body[0])}")


def render(p: Program) -> str:
    if len(p.body) != 1:
        raise IllFormedProgram("concrete syntax admits exactly one top-level statement")
    return f"trav({p.array_param}, {p.size_param}) {{ {render_stmt(p.body[0])} }}"


# ---------------------------------------------------------------------------
# Linear normal form and pattern recognition

def linearize(e: Expr) -> tuple[dict[str, int], int]:
    """Return ``(coefficients, constant)`` with zero coefficients dropped."""
    coeffs: dict[str, int] = {}
    const = 0

    def walk(node, sign):
        nonlocal const
        if isinstance(node, IntConst):
            const += sign * node.value
        elif isinstance(node, Var):
            coeffs[node.name] = coeffs.get(node.name, 0) + sign
        elif isinstance(node, Add):
            walk(node.left, sign)
            walk(node.right, sign)
        elif isinstance(node, Sub):
            walk(node.left, sign)
            walk(node.right, -sign)
        else:
            raise IllFormedProgram(f"not an expression: {node!r}")

    walk(e, 1)
    return {v: c for v, c in coeffs.items() if c}, const


def recognize_trav(p: Program) -> TravInstance | NotTravPattern:
    """Map ``p`` onto ``TravInstance(L, R, Z)`` or explain why it is not one.

    Bounds and index are compared in linear normal form, so ``i-1``,
    ``i+-1`` and ``-1+i`` all denote ``Z = -1``.
    """
    if len(p.body) != 1 or not isinstance(p.body[0], ForRange):
        return NotTravPattern("program body must be a single for-loop")
    loop = p.body[0]
    if len(loop.body) != 1 or not isinstance(loop.body[0], HeapRead):
        return NotTravPattern("loop body must be a single array read")
    read = loop.body[0]

    lo_coeffs, L = linearize(loop.lo)
    if lo_coeffs:
        return NotTravPattern("lower bound must be a constant")
    hi_coeffs, hi_const = linearize(loop.hi)
    if hi_coeffs != {p.size_param: 1}:
        return NotTravPattern(f"upper bound must have the form {p.size_param}-R")
    idx_coeffs, Z = linearize(read.index)
    if idx_coeffs != {loop.loop_var: 1}:
        return NotTravPattern(f"index must have the form {loop.loop_var}+Z")
    R = -hi_const
    if max(abs(L), abs(R), abs(Z)) > MAX_CONST:
        return NotTravPattern("normalized constant exceeds magnitude bound")
    return TravInstance(L, R, Z)
