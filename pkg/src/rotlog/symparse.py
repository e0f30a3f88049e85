"""Parser for the operator expression grammar used by the command line.

Grammar (whitespace insensitive):

    expr    := term (('+' | '-') term)*
    term    := factor+                      -- adjacency multiplies
    factor  := ('+' | '-')* primary ('^' INT)?
    primary := RATIONAL | 'i' | 'hbar' | 'x' | 'y' | 'z'
             | 'dx' | 'dy' | 'dz' | 'Lx' | 'Ly' | 'Lz'
             | '(' expr ')' | '[' expr ',' expr ']'

RATIONAL is an integer, a decimal, or p/q with integer p, q.  Commutator
brackets [A, B] evaluate eagerly to AB - BA.  The canonical printer's
spellings ∂x/∂y/∂z and ħ are accepted as aliases of dx/dy/dz and hbar,
so printing and re-parsing is a fixed point.
"""

from __future__ import annotations

from fractions import Fraction

from .symop import ExactScalar, SymOp, angular_momentum, commutator


class ExpressionError(ValueError):
    """Syntax error in an operator expression; carries the 0-based position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


class UnknownSymbolError(ExpressionError):
    pass


_PUNCT = set("+-*/^()[],")

_SYMBOL_VALUES = {
    "x": lambda: SymOp.generator("x"),
    "y": lambda: SymOp.generator("y"),
    "z": lambda: SymOp.generator("z"),
    "dx": lambda: SymOp.generator("dx"),
    "dy": lambda: SymOp.generator("dy"),
    "dz": lambda: SymOp.generator("dz"),
    "i": lambda: SymOp.identity(ExactScalar.i()),
    "hbar": lambda: SymOp.identity(ExactScalar.hbar()),
    "Lx": lambda: angular_momentum("x"),
    "Ly": lambda: angular_momentum("y"),
    "Lz": lambda: angular_momentum("z"),
}

_ALIASES = {"ħ": "hbar"}

# canonical output uses adjacency (iħx∂y), so letter runs are split into
# known symbols, longest match first
_RUN_SYMBOLS = ("hbar", "Lx", "Ly", "Lz", "dx", "dy", "dz", "ħ", "i", "x", "y", "z")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Split into (kind, value, position) tokens; kind in {num, name, punct}."""
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in _PUNCT:
            tokens.append(("punct", ch, pos))
            pos += 1
            continue
        if ch.isdigit() or ch == ".":
            start = pos
            while pos < len(text) and (text[pos].isdigit() or text[pos] == "."):
                pos += 1
            lit = text[start:pos]
            if lit.count(".") > 1:
                raise ExpressionError(f"malformed number {lit!r}", start)
            tokens.append(("num", lit, start))
            continue
        if ch == "∂":
            if pos + 1 < len(text) and text[pos + 1] in "xyz":
                tokens.append(("name", "d" + text[pos + 1], pos))
                pos += 2
                continue
            raise ExpressionError("∂ must be followed by x, y or z", pos)
        if ch.isalpha():
            start = pos
            while pos < len(text) and text[pos].isalpha():
                pos += 1
            run = text[start:pos]
            k = 0
            while k < len(run):
                for sym in _RUN_SYMBOLS:
                    if run.startswith(sym, k):
                        tokens.append(("name", _ALIASES.get(sym, sym), start + k))
                        k += len(sym)
                        break
                else:
                    raise UnknownSymbolError(f"unknown symbol {run[k:]!r}", start + k)
            continue
        raise ExpressionError(f"unexpected character {ch!r}", pos)
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self):
        return self.tokens[self.index] if self.index < len(self.tokens) else (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.index += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.next()
        if kind != "punct" or val != value:
            raise ExpressionError(f"expected {value!r}", pos)

    def parse(self) -> SymOp:
        op = self.expr()
        kind, val, pos = self.peek()
        if kind is not None:
            raise ExpressionError(f"unexpected trailing {val!r}", pos)
        return op

    def expr(self) -> SymOp:
        out = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "punct" and val in "+-":
                self.next()
                rhs = self.term()
                out = out + rhs if val == "+" else out - rhs
            else:
                return out

    def _starts_factor(self) -> bool:
        kind, val, _ = self.peek()
        if kind in ("num", "name"):
            return True
        return kind == "punct" and val in "([-+"

    def term(self) -> SymOp:
        out = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "punct" and val == "*":
                self.next()
                out = out * self.factor()
            elif self._starts_factor() and not (kind == "punct" and val in "+-"):
                # adjacency: 2iħx∂y
                out = out * self.factor()
            else:
                return out

    def factor(self) -> SymOp:
        sign = 1
        while True:
            kind, val, _ = self.peek()
            if kind == "punct" and val in "+-":
                self.next()
                if val == "-":
                    sign = -sign
            else:
                break
        out = self.primary()
        kind, val, pos = self.peek()
        if kind == "punct" and val == "^":
            self.next()
            kind, val, pos = self.next()
            if kind != "num" or "." in val:
                raise ExpressionError("exponent must be a nonnegative integer", pos)
            out = out ** int(val)
        return out if sign > 0 else -out

    def primary(self) -> SymOp:
        kind, val, pos = self.next()
        if kind == "num":
            try:
                value = Fraction(val)
            except ValueError:
                raise ExpressionError(f"malformed number {val!r}", pos) from None
            nkind, nval, _ = self.peek()
            if nkind == "punct" and nval == "/":
                self.next()
                dkind, dval, dpos = self.next()
                if dkind != "num":
                    raise ExpressionError("expected a number after '/'", dpos)
                if "." in val or "." in dval:
                    raise ExpressionError("p/q constants must have integer p and q", dpos)
                value = value / Fraction(dval)
            return SymOp.identity(value)
        if kind == "name":
            make = _SYMBOL_VALUES.get(val)
            if make is None:
                raise UnknownSymbolError(f"unknown symbol {val!r}", pos)
            return make()
        if kind == "punct" and val == "(":
            out = self.expr()
            self.expect(")")
            return out
        if kind == "punct" and val == "[":
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect("]")
            return commutator(a, b)
        raise ExpressionError(f"unexpected {val!r}" if val else "unexpected end of input", pos)


def parse_operator(text: str) -> SymOp:
    """Parse an expression into a normal-ordered SymOp.

    Raises ExpressionError (with .position) on syntax errors and
    UnknownSymbolError for identifiers outside the grammar.
    """
    return _Parser(text).parse()
