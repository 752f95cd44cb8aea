"""Multicomplex numbers M(n) in flat coefficient form.

A unit of I(n) is an integer mask in ``[0, 2**n)``: bit ``j - 1`` set means the
basic unit ``i_j`` takes part in the product, and mask 0 is the real unit.
Every basic unit squares to -1 and all of them commute, so

    unit(S) * unit(T) = (-1)**|S & T| * unit(S ^ T).

The recursive pair representation ``eta1 + eta2 * i_n`` is kept alongside as an
independent oracle for the flat product.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Union

import numpy as np

__all__ = [
    "Multicomplex",
    "RecursiveMulticomplex",
    "OrderMismatchError",
    "popcount",
    "square_sign",
    "is_imaginary",
    "is_hyperbolic",
    "unit_product",
    "unit_name",
    "all_units",
    "product_tables",
    "mul_coeffs",
    "pow_coeffs",
    "add",
    "mul",
    "power",
    "norm",
    "flat_from_recursive",
    "recursive_from_flat",
    "recursive_mul",
    "recursive_add",
]


class OrderMismatchError(ValueError):
    """Raised when two multicomplex operands live in different orders."""


# --------------------------------------------------------------------------- units


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def square_sign(mask: int) -> int:
    """Return +1 or -1, the value of ``unit**2``."""
    return -1 if popcount(mask) % 2 else 1


def is_imaginary(mask: int) -> bool:
    return popcount(mask) % 2 == 1


def is_hyperbolic(mask: int) -> bool:
    return mask != 0 and popcount(mask) % 2 == 0


def unit_product(u: int, v: int) -> tuple[int, int]:
    """Multiply two canonical units, returning ``(sign, mask)``."""
    return (-1 if popcount(u & v) % 2 else 1), u ^ v


def unit_name(mask: int) -> str:
    """``0 -> '1'``, ``0b101 -> 'i1i3'``."""
    if mask == 0:
        return "1"
    parts = []
    j = 1
    while mask:
        if mask & 1:
            parts.append(f"i{j}")
        mask >>= 1
        j += 1
    return "".join(parts)


def all_units(n: int) -> range:
    return range(1 << n)


@lru_cache(maxsize=None)
def product_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index and sign tables for the flat product of order ``n``.

    ``partner[u, w] = u ^ w`` is the unit that multiplies ``u`` into ``w`` and
    ``sign[u, w]`` is the sign of that product, so that

        (a * b)[w] = sum_u sign[u, w] * a[u] * b[partner[u, w]].
    """
    size = 1 << n
    u = np.arange(size)[:, None]
    w = np.arange(size)[None, :]
    partner = u ^ w
    shared = u & partner
    parity = np.zeros_like(shared)
    for bit in range(n):
        parity ^= (shared >> bit) & 1
    sign = np.where(parity == 1, -1.0, 1.0)
    partner.setflags(write=False)
    sign.setflags(write=False)
    return partner, sign


def _order_of(size: int) -> int:
    n = size.bit_length() - 1
    if n < 0 or (1 << n) != size:
        raise ValueError(f"coefficient count {size} is not a power of two")
    return n


def mul_coeffs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Flat product over the last axis; leading axes broadcast.

    Direct O(4**n) expansion over unit pairs.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise OrderMismatchError(
            f"orders differ: {a.shape[-1]} vs {b.shape[-1]} coefficients"
        )
    partner, sign = product_tables(_order_of(a.shape[-1]))
    return np.einsum("...u,uw,...uw->...w", a, sign, b[..., partner])


def pow_coeffs(a: np.ndarray, p: int) -> np.ndarray:
    """``a**p`` by left-to-right repeated multiplication."""
    if p < 1:
        raise ValueError(f"power must be >= 1, got {p}")
    out = np.array(a, dtype=float)
    for _ in range(p - 1):
        out = mul_coeffs(out, a)
    return out


# --------------------------------------------------------------------------- flat type


Scalar = Union[int, float]


class Multicomplex:
    """An element of M(n) stored as ``2**n`` real coefficients indexed by unit mask.

    Instances are immutable; the coefficient array is read-only.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs=None):
        if order < 0:
            raise ValueError(f"order must be >= 0, got {order}")
        size = 1 << order
        if coeffs is None:
            arr = np.zeros(size)
        else:
            arr = np.array(coeffs, dtype=float).reshape(-1)
            if arr.shape != (size,):
                raise ValueError(
                    f"order {order} needs {size} coefficients, got {arr.size}"
                )
        if not np.all(np.isfinite(arr)):
            raise ValueError("multicomplex coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Multicomplex is immutable")

    # constructors -----------------------------------------------------------

    @classmethod
    def zero(cls, order: int) -> "Multicomplex":
        return cls(order)

    @classmethod
    def one(cls, order: int) -> "Multicomplex":
        return cls.unit(order, 0)

    @classmethod
    def unit(cls, order: int, mask: int, value: float = 1.0) -> "Multicomplex":
        if not 0 <= mask < (1 << order):
            raise ValueError(f"unit {unit_name(mask)} exceeds order {order}")
        c = np.zeros(1 << order)
        c[mask] = value
        return cls(order, c)

    @classmethod
    def from_terms(cls, order: int, terms: dict[int, float]) -> "Multicomplex":
        c = np.zeros(1 << order)
        for mask, value in terms.items():
            if not 0 <= mask < (1 << order):
                raise ValueError(f"unit {unit_name(mask)} exceeds order {order}")
            c[mask] += value
        return cls(order, c)

    # queries ----------------------------------------------------------------

    def __getitem__(self, mask: int) -> float:
        return float(self.coeffs[mask])

    def terms(self) -> dict[int, float]:
        """Nonzero coefficients keyed by unit mask, ascending."""
        return {int(m): float(v) for m, v in enumerate(self.coeffs) if v != 0.0}

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.coeffs, self.coeffs)))

    # arithmetic -------------------------------------------------------------

    def _check(self, other: "Multicomplex") -> None:
        if self.order != other.order:
            raise OrderMismatchError(
                f"orders differ: M({self.order}) vs M({other.order})"
            )

    def __add__(self, other):
        if isinstance(other, (int, float)):
            c = self.coeffs.copy()
            c[0] += other
            return Multicomplex(self.order, c)
        if not isinstance(other, Multicomplex):
            return NotImplemented
        self._check(other)
        return Multicomplex(self.order, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return Multicomplex(self.order, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, (int, float, Multicomplex)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Multicomplex(self.order, self.coeffs * other)
        if not isinstance(other, Multicomplex):
            return NotImplemented
        self._check(other)
        return Multicomplex(self.order, mul_coeffs(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Multicomplex(self.order, self.coeffs / other)
        return NotImplemented

    def __pow__(self, p: int):
        if not isinstance(p, int):
            return NotImplemented
        return Multicomplex(self.order, pow_coeffs(self.coeffs, p))

    # comparison -------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Multicomplex):
            return NotImplemented
        return self.order == other.order and bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.order, self.coeffs.tobytes()))

    def allclose(self, other: "Multicomplex", atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= atol)

    def __repr__(self):
        from .literal import format_literal

        return f"Multicomplex({self.order}, {format_literal(self)!r})"


def add(a: Multicomplex, b: Multicomplex) -> Multicomplex:
    return a + b


def mul(a: Multicomplex, b: Multicomplex) -> Multicomplex:
    return a * b


def power(a: Multicomplex, p: int) -> Multicomplex:
    return a**p


def norm(a: Multicomplex) -> float:
    """Euclidean norm of the coefficient vector in R^(2**n)."""
    return a.norm()


# --------------------------------------------------------------------------- recursive oracle


class RecursiveMulticomplex:
    """``eta1 + eta2 * i_n`` with halves in M(n-1); order 0 is a bare real.

    Arithmetic follows the complex-like recursion directly and never touches
    the flat sign table, which is what makes it usable as an oracle.
    """

    __slots__ = ("order", "value", "lo", "hi")

    def __init__(self, value=None, lo=None, hi=None):
        if value is not None:
            self.order = 0
            self.value = float(value)
            self.lo = self.hi = None
        else:
            if lo.order != hi.order:
                raise OrderMismatchError("both halves must share an order")
            self.order = lo.order + 1
            self.value = None
            self.lo, self.hi = lo, hi

    @classmethod
    def zero(cls, order: int) -> "RecursiveMulticomplex":
        if order == 0:
            return cls(0.0)
        z = cls.zero(order - 1)
        return cls(lo=z, hi=z)

    def __add__(self, other):
        return recursive_add(self, other)

    def __neg__(self):
        if self.order == 0:
            return RecursiveMulticomplex(-self.value)
        return RecursiveMulticomplex(lo=-self.lo, hi=-self.hi)

    def __sub__(self, other):
        return recursive_add(self, -other)

    def __mul__(self, other):
        return recursive_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, RecursiveMulticomplex) or self.order != other.order:
            return False
        if self.order == 0:
            return self.value == other.value
        return self.lo == other.lo and self.hi == other.hi

    def __repr__(self):
        if self.order == 0:
            return repr(self.value)
        return f"({self.lo!r}, {self.hi!r})"


def recursive_add(a: RecursiveMulticomplex, b: RecursiveMulticomplex) -> RecursiveMulticomplex:
    if a.order != b.order:
        raise OrderMismatchError(f"orders differ: {a.order} vs {b.order}")
    if a.order == 0:
        return RecursiveMulticomplex(a.value + b.value)
    return RecursiveMulticomplex(lo=recursive_add(a.lo, b.lo), hi=recursive_add(a.hi, b.hi))


def recursive_mul(a: RecursiveMulticomplex, b: RecursiveMulticomplex) -> RecursiveMulticomplex:
    """``(a1 + a2 i)(b1 + b2 i) = (a1 b1 - a2 b2) + (a1 b2 + a2 b1) i``."""
    if a.order != b.order:
        raise OrderMismatchError(f"orders differ: {a.order} vs {b.order}")
    if a.order == 0:
        return RecursiveMulticomplex(a.value * b.value)
    lo = recursive_mul(a.lo, b.lo) - recursive_mul(a.hi, b.hi)
    hi = recursive_mul(a.lo, b.hi) + recursive_mul(a.hi, b.lo)
    return RecursiveMulticomplex(lo=lo, hi=hi)


def recursive_from_flat(a: Multicomplex) -> RecursiveMulticomplex:
    # Units without i_n come first (bit n-1 clear), so each half is a slice.
    def build(coeffs: np.ndarray) -> RecursiveMulticomplex:
        if coeffs.size == 1:
            return RecursiveMulticomplex(float(coeffs[0]))
        half = coeffs.size // 2
        return RecursiveMulticomplex(lo=build(coeffs[:half]), hi=build(coeffs[half:]))

    return build(a.coeffs)


def flat_from_recursive(r: RecursiveMulticomplex) -> Multicomplex:
    def collect(node: RecursiveMulticomplex, out: list[float]) -> None:
        if node.order == 0:
            out.append(node.value)
        else:
            collect(node.lo, out)
            collect(node.hi, out)

    out: list[float] = []
    collect(r, out)
    return Multicomplex(r.order, out)
