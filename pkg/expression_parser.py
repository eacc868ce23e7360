"""Parser for the super-polynomial text grammar.

Grammar (whitespace is ignored):

    expr    := ['+' | '-'] term (('+' | '-') term)*
    term    := factor (('*' factor) | ('/' INT))*
    factor  := primary ['^' INT]
    primary := INT | 'i' | NAME | '(' expr ')'

Antifields carry a trailing '*' (``M1*``). A '*' directly after a name is read
as part of that name when ``name*`` is a known generator and the next character
closes the factor (whitespace, end of input, '*', '+', '-', ')' or '^').
Grassmann factors are multiplied in written order and then normal-ordered.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction

from superalgebra import (
    FieldSymbol,
    I,
    SuperAlgebraError,
    SuperPolynomial,
    symbol_table,
)

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")
_NAME_TERMINATORS = set(" \t\n*+-)^")


class ParseError(SuperAlgebraError):
    """Malformed expression; names the offending token"""

    def __init__(self, message, token=None, position=None):
        self.token = token
        self.position = position
        if token is not None:
            message = f"{message} at position {position}: unexpected token '{token}'"
        super().__init__(message)


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "op", "end"
    text: str
    position: int


def tokenize(text, symbols):
    """Split text into tokens, attaching antifield stars to known names"""
    tokens = []
    pos = 0
    length = len(text)
    while pos < length:
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            break
        number, name, op = match.groups()
        start = match.start(match.lastindex)
        pos = match.end()
        if number is not None:
            tokens.append(Token("int", number, start))
        elif name is not None:
            if pos < length and text[pos] == "*" and f"{name}*" in symbols:
                after = text[pos + 1] if pos + 1 < length else " "
                if after in _NAME_TERMINATORS:
                    name = f"{name}*"
                    pos += 1
            tokens.append(Token("name", name, start))
        elif op.strip():
            if op not in "+-*/^()":
                raise ParseError("invalid character", op, start)
            tokens.append(Token("op", op, start))
    tokens.append(Token("end", "", length))
    return tokens


class _Parser:
    def __init__(self, text, symbols):
        self.symbols = symbols
        self.tokens = tokenize(text, symbols)
        self.index = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text):
        token = self.current
        if token.kind != "op" or token.text != text:
            raise ParseError(f"expected '{text}'", token.text or "<end>", token.position)
        return self.advance()

    def parse(self):
        result = self.expr()
        if self.current.kind != "end":
            raise ParseError("trailing input", self.current.text, self.current.position)
        return result

    def expr(self):
        negative = False
        if self.current.kind == "op" and self.current.text in "+-":
            negative = self.advance().text == "-"
        result = self.term()
        if negative:
            result = -result
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance().text
            value = self.term()
            result = result + value if op == "+" else result - value
        return result

    def term(self):
        result = self.factor()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance().text
            if op == "*":
                result = result * self.factor()
            else:
                token = self.current
                if token.kind != "int":
                    raise ParseError("division only by an integer literal", token.text or "<end>", token.position)
                self.advance()
                if int(token.text) == 0:
                    raise ParseError("division by zero", token.text, token.position)
                result = result.scale(Fraction(1, int(token.text)))
        return result

    def factor(self):
        base = self.primary()
        if self.current.kind == "op" and self.current.text == "^":
            self.advance()
            token = self.current
            if token.kind != "int":
                raise ParseError("exponent must be a non-negative integer", token.text or "<end>", token.position)
            self.advance()
            return base ** int(token.text)
        return base

    def primary(self):
        token = self.current
        if token.kind == "int":
            self.advance()
            return SuperPolynomial.constant(int(token.text))
        if token.kind == "name":
            self.advance()
            if token.text in self.symbols:
                return SuperPolynomial.generator(self.symbols[token.text])
            if token.text == "i":
                return SuperPolynomial.constant(I)
            raise ParseError("unknown generator", token.text, token.position)
        if token.kind == "op" and token.text == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError("expected a number, generator or '('", token.text or "<end>", token.position)


def parse_expression(text, symbols):
    """Parse text into a SuperPolynomial over the given generators"""
    if isinstance(symbols, dict):
        table = symbols
    else:
        table = symbol_table(symbols)
    if "i" in table:
        raise ParseError("'i' is reserved for the imaginary unit")
    if not text or not text.strip():
        raise ParseError("empty expression")
    return _Parser(text, table).parse()


def parse_univariate(text, variable="x"):
    """Parse a real polynomial in one variable into ascending rational coefficients"""
    symbol = FieldSymbol(variable, 0)
    poly = parse_expression(text, [symbol])
    degree = 0
    for mono, _ in poly.items():
        degree = max(degree, mono.exponent(symbol))
    coefficients = [Fraction(0)] * (degree + 1)
    for mono, coeff in poly.items():
        if not coeff.is_real:
            raise ParseError(f"coefficient {coeff.to_text()} of '{text}' is not real")
        coefficients[mono.exponent(symbol)] = coeff.re
    logger.debug("parsed %s as coefficients %s", text, coefficients)
    return tuple(coefficients)


def format_univariate(coefficients, variable="x"):
    symbol = FieldSymbol(variable, 0)
    x = SuperPolynomial.generator(symbol)
    poly = SuperPolynomial.zero()
    for power, coeff in enumerate(coefficients):
        poly = poly + (x ** power).scale(coeff)
    return poly.to_text()
