"""Text grammar for polynomials.

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' INT)?
    atom   := NUMBER | NAME | '(' expr ')' | '-' atom

NAME matches [A-Za-z_][A-Za-z0-9_]*. NUMBER is an integer or a rational
literal a/b. Whitespace is insignificant. There is no implicit
multiplication. Parse errors carry line and column. Printing (Polynomial.__str__)
emits canonical degrevlex-descending form and parse(print(f)) == f.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .fields import Field, QQ
from .poly import Polynomial, VarSet

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<number>\d+(?:\s*/\s*\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*^()])"
)


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "name" | "op" | "end"
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise PolynomialSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            tokens.append(_Token(kind, chunk.replace(" ", ""), line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(_Token("end", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], vars: VarSet, field: Field):
        self.tokens = tokens
        self.i = 0
        self.vars = vars
        self.field = field

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok: _Token):
        raise PolynomialSyntaxError(message, tok.line, tok.column)

    def parse(self) -> Polynomial:
        p = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            self.fail(f"unexpected {tok.text!r}", tok)
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.take()
                q = self.term()
                p = p + q if tok.text == "+" else p - q
            else:
                return p

    def term(self) -> Polynomial:
        p = self.factor()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.take()
                p = p * self.factor()
            else:
                return p

    def factor(self) -> Polynomial:
        p = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.take()
            etok = self.take()
            if etok.kind != "number" or "/" in etok.text:
                self.fail("exponent must be a nonnegative integer", etok)
            p = p ** int(etok.text)
        return p

    def atom(self) -> Polynomial:
        tok = self.take()
        if tok.kind == "number":
            value = Fraction(tok.text)
            return Polynomial.const(self.vars, self.field, value)
        if tok.kind == "name":
            if tok.text not in self.vars:
                self.fail(f"unknown variable {tok.text!r}", tok)
            return Polynomial.variable(self.vars, self.field, tok.text)
        if tok.kind == "op" and tok.text == "(":
            p = self.expr()
            closing = self.take()
            if not (closing.kind == "op" and closing.text == ")"):
                self.fail("expected ')'", closing)
            return p
        if tok.kind == "op" and tok.text == "-":
            return -self.atom()
        self.fail(f"unexpected {tok.text!r}" if tok.text else "unexpected end of input", tok)


def infer_varset(text: str) -> VarSet:
    """Variables in order of first appearance."""
    seen = []
    for tok in _tokenize(text):
        if tok.kind == "name" and tok.text not in seen:
            seen.append(tok.text)
    return VarSet(tuple(seen))


def parse_polynomial(text: str, vars: VarSet | None = None, field: Field = QQ) -> Polynomial:
    if vars is None:
        vars = infer_varset(text)
    if len(vars) == 0:
        raise PolynomialSyntaxError("no variables given and none inferable", 1, 1)
    return _Parser(_tokenize(text), vars, field).parse()
