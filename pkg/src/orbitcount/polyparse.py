"""Parser for the polynomial text syntax.

Accepts +, -, *, /, ^, parentheses, integer literals, the imaginary
unit i, and declared variable names.  Division is only allowed by
subexpressions that evaluate to nonzero constants, so "x/2" and
"1/(2+i)" parse while "1/x" is rejected.  The printer in polynomial.py
round-trips through this parser bit-exactly.
"""

from __future__ import annotations

import re
from typing import List, Optional, Sequence, Tuple

from .polynomial import Polynomial, default_names
from .scalars import GR_I, GaussianRational

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|([-+*/^()]))")


class PolyParseError(ValueError):
    pass


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise PolyParseError(f"unexpected character {text[pos]!r} at {pos}")
        pos = m.end()
        if m.group(1):
            tokens.append(("int", m.group(1)))
        elif m.group(2):
            tokens.append(("name", m.group(2)))
        else:
            tokens.append(("op", m.group(3)))
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, tokens, names: Tuple[str, ...]):
        self.tokens = tokens
        self.k = 0
        self.names = names
        self.index = {name: i for i, name in enumerate(names)}
        if "i" in self.index:
            raise PolyParseError("variable name 'i' collides with the imaginary unit")

    def peek(self):
        return self.tokens[self.k]

    def take(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise PolyParseError(f"expected {op!r}, got {val!r}")

    def parse_expr(self) -> Polynomial:
        sign = 1
        while self.peek() == ("op", "-") or self.peek() == ("op", "+"):
            if self.take()[1] == "-":
                sign = -sign
        result = self.parse_term()
        if sign < 0:
            result = -result
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            term = self.parse_term()
            result = result + term if op == "+" else result - term
        return result

    def parse_term(self) -> Polynomial:
        result = self.parse_factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                result = result * self.parse_factor()
            elif kind == "op" and val == "/":
                self.take()
                divisor = self.parse_factor()
                c = _constant_of(divisor)
                if c is None or c.is_zero():
                    raise PolyParseError("division only by nonzero constants")
                result = result * Polynomial.constant(result.n, 1 / c, self.names)
            else:
                return result

    def parse_factor(self) -> Polynomial:
        sign = 1
        while self.peek() == ("op", "-") or self.peek() == ("op", "+"):
            if self.take()[1] == "-":
                sign = -sign
        kind, val = self.take()
        n = len(self.names)
        if kind == "int":
            base = Polynomial.constant(n, int(val), self.names)
        elif kind == "name":
            if val == "i":
                base = Polynomial.constant(n, GR_I, self.names)
            elif val in self.index:
                base = Polynomial.variable(self.index[val], n, self.names)
            else:
                raise PolyParseError(f"unknown variable {val!r}")
        elif kind == "op" and val == "(":
            base = self.parse_expr()
            self.expect_op(")")
        else:
            raise PolyParseError(f"unexpected token {val!r}")
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "int":
                raise PolyParseError("exponent must be a nonnegative integer")
            base = base ** int(val)
        return base if sign > 0 else -base


def _constant_of(P: Polynomial) -> Optional[GaussianRational]:
    if P.is_zero():
        return GaussianRational(0)
    if P.degree() == 0:
        return P.constant_term()
    return None


def parse_polynomial(text: str, variables: Sequence[str] = (), n: Optional[int] = None) -> Polynomial:
    """Parse text into a Polynomial over the given variable names.

    If only n is given, names default to x1..xn.
    """
    if n is not None and not variables:
        variables = default_names(n)
    names = tuple(variables)
    parser = _Parser(_tokenize(text), names)
    result = parser.parse_expr()
    if parser.peek()[0] != "end":
        raise PolyParseError(f"trailing input at token {parser.peek()[1]!r}")
    return result


def parse_scalar(text: str) -> GaussianRational:
    P = parse_polynomial(text, ())
    c = _constant_of(P)
    if c is None:
        raise PolyParseError("expected a constant expression")
    return c
