"""Text literals for multicomplex numbers.

Grammar (whitespace between tokens is ignored)::

    literal := term (('+' | '-') term)*
    term    := number? ('*'? unit)?
    unit    := ('i' digit+)+
    number  := decimal with optional sign and exponent

A bare unit has coefficient 1, a bare number is the real part, and repeated
units are summed.  A unit that repeats a basic factor (``i1i1``) is reduced
with ``i_j**2 = -1``.
"""
from __future__ import annotations

import re

from .algebra import Multicomplex, unit_name, unit_product

__all__ = ["LiteralError", "parse_literal", "parse_unit", "format_literal"]

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_BASIC = re.compile(r"i(\d+)")


class LiteralError(ValueError):
    """Malformed literal; ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class _Scanner:
    def __init__(self, text: str, order: int):
        self.text = text
        self.order = order
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def number(self) -> float | None:
        self.skip()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return float(m.group())

    def unit(self) -> tuple[int, int] | None:
        self.skip()
        sign, mask = 1, 0
        start = self.pos
        while True:
            m = _BASIC.match(self.text, self.pos)
            if not m:
                break
            j = int(m.group(1))
            if j == 0:
                raise LiteralError("basic units start at i1", self.pos)
            if j > self.order:
                raise LiteralError(f"unit i{j} exceeds order {self.order}", self.pos)
            s, mask = unit_product(mask, 1 << (j - 1))
            sign *= s
            self.pos = m.end()
        if self.pos == start:
            return None
        return sign, mask


def _term(sc: _Scanner, terms: dict[int, float], sign: float) -> None:
    start = sc.pos
    value = sc.number()
    if sc.peek() == "*":
        if value is None:
            raise LiteralError("'*' needs a coefficient before it", sc.pos)
        sc.pos += 1
        unit = sc.unit()
        if unit is None:
            raise LiteralError("expected unit after '*'", sc.pos)
    else:
        unit = sc.unit()
    if value is None and unit is None:
        sc.skip()
        raise LiteralError("expected number or unit", max(start, sc.pos))
    coeff = sign * (1.0 if value is None else value)
    if unit is None:
        terms[0] = terms.get(0, 0.0) + coeff
    else:
        usign, mask = unit
        terms[mask] = terms.get(mask, 0.0) + usign * coeff


def parse_literal(text: str, order: int) -> Multicomplex:
    """Parse ``text`` into an element of M(order)."""
    sc = _Scanner(text, order)
    if sc.at_end():
        raise LiteralError("empty literal", 0)
    terms: dict[int, float] = {}
    sign = 1.0
    if sc.peek() in "+-" and not _NUMBER.match(text, sc.pos):
        sign = -1.0 if sc.peek() == "-" else 1.0
        sc.pos += 1
    _term(sc, terms, sign)
    while not sc.at_end():
        op = sc.peek()
        if op not in "+-":
            raise LiteralError(f"expected '+' or '-', found {op!r}", sc.pos)
        sc.pos += 1
        _term(sc, terms, -1.0 if op == "-" else 1.0)
    return Multicomplex.from_terms(order, terms)


def parse_unit(text: str, order: int) -> int:
    """Parse a single unit name (``'1'``, ``'i2'``, ``'i1i3'``) into its mask."""
    stripped = text.strip()
    if stripped == "1":
        return 0
    sc = _Scanner(stripped, order)
    unit = sc.unit()
    if unit is None or not sc.at_end():
        raise LiteralError(f"not a unit: {text!r}", sc.pos)
    sign, mask = unit
    if sign != 1:
        raise LiteralError(f"unit {text!r} reduces to a negative unit", 0)
    return mask


def _fmt(x: float) -> str:
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def format_literal(a: Multicomplex) -> str:
    """Inverse of :func:`parse_literal`; units in ascending mask order."""
    pieces = []
    for mask, value in a.terms().items():
        mag = abs(value)
        if mask == 0:
            body = _fmt(mag)
        elif mag == 1.0:
            body = unit_name(mask)
        else:
            body = f"{_fmt(mag)}*{unit_name(mask)}"
        neg = value < 0
        if not pieces:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f" - {body}" if neg else f" + {body}")
    return "".join(pieces) if pieces else "0"
