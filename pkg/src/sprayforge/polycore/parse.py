"""Parser for the polynomial text grammar.

Grammar (whitespace insignificant)::

    expr    := term (('+' | '-') term)*
    term    := unary ('*' unary)*
    unary   := ('+' | '-') unary | power
    power   := atom ('^' INT)?
    atom    := INT ('/' INT)? | NAME | '(' expr ')'

Names are ``x1..xn`` by default; chart rings add ``t`` and ``l1..l{r-1}``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from ..errors import PolyParseError, UnknownVariableError
from .poly import MPoly, var_names

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - the pattern always matches non-space
            raise PolyParseError("unexpected character", pos, text)
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        else:
            ch = m.group(3)
            if ch not in "+-*^/()":
                raise PolyParseError(f"unexpected character {ch!r}", m.start(3), text)
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.names = {name: i for i, name in enumerate(names)}
        self.nvars = len(names)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return PolyParseError(msg, tok[2], self.text)

    def parse(self) -> MPoly:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self) -> MPoly:
        p = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> MPoly:
        p = self.unary()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            p = p * self.unary()
        return p

    def unary(self) -> MPoly:
        tok = self.peek()
        if tok[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if tok[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> MPoly:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "int":
                raise self.error("exponent must be a nonnegative integer literal", tok)
            base = base ** int(tok[1])
            if self.peek()[:2] == ("op", "^"):
                raise self.error("chained exponent; use parentheses")
        return base

    def atom(self) -> MPoly:
        tok = self.take()
        kind, val, pos = tok
        if kind == "int":
            c = Fraction(int(val))
            if self.peek()[:2] == ("op", "/"):
                self.take()
                den = self.take()
                if den[0] != "int":
                    raise self.error("rational literal needs an integer denominator", den)
                if int(den[1]) == 0:
                    raise self.error("zero denominator", den)
                c = Fraction(int(val), int(den[1]))
            return MPoly.const(c, self.nvars)
        if kind == "name":
            if val not in self.names:
                raise UnknownVariableError(f"unknown variable {val!r}", pos, self.text)
            return MPoly.var(self.names[val], self.nvars)
        if tok[:2] == ("op", "("):
            p = self.expr()
            close = self.take()
            if close[:2] != ("op", ")"):
                raise self.error("expected ')'", close)
            return p
        if kind == "end":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected token {val!r}", tok)


def parse_poly(text: str, nvars: int | None = None, names: Sequence[str] | None = None) -> MPoly:
    """Parse ``text`` into a polynomial.

    ``names`` fixes the variable order; without it the ring is x1..x{nvars}.
    Raises PolyParseError (with a character position) on bad syntax and
    UnknownVariableError on names outside the ring.
    """
    if names is None:
        if nvars is None:
            raise ValueError("either nvars or names is required")
        names = var_names(nvars)
    elif nvars is not None and nvars != len(names):
        raise ValueError("nvars disagrees with the number of names")
    return _Parser(text, list(names)).parse()


def parse_polys(texts: Sequence[str], nvars: int | None = None, names=None) -> list[MPoly]:
    return [parse_poly(t, nvars, names) for t in texts]
