"""Idempotent representation of multicomplex numbers.

With ``gamma_h = (1 + i_h i_{h+1}) / 2`` and its conjugate ``1 - gamma_h``,
any ``eta = eta1 + eta2 i_n`` splits as

    eta = (eta1 - eta2 i_{n-1}) gamma_{n-1} + (eta1 + eta2 i_{n-1}) conj(gamma_{n-1})

and arithmetic acts independently on the two halves.  Splitting recursively
down to order 1 gives ``2**(n-1)`` complex components.  Component index ``k``
has bit ``h - 1`` clear for the ``gamma_h`` branch and set for the conjugate
branch; the top level is split first.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import Multicomplex

__all__ = [
    "IdempotentSplit",
    "ComplexVector",
    "gamma",
    "embed",
    "split",
    "join",
    "decompose_full",
    "recompose_full",
    "decomposition_matrix",
    "decompose_coeffs",
    "recompose_coeffs",
    "norm_identity_residual",
]


@dataclass(frozen=True)
class IdempotentSplit:
    level: int
    a: Multicomplex  # gamma component
    b: Multicomplex  # conjugate-gamma component


@dataclass(frozen=True)
class ComplexVector:
    """The ``2**(n-1)`` complex components of an element of M(n)."""

    order: int
    components: np.ndarray

    def __len__(self):
        return len(self.components)

    def __getitem__(self, k):
        return complex(self.components[k])


def gamma(h: int, n: int, conjugate: bool = False) -> Multicomplex:
    """``(1 + i_h i_{h+1}) / 2`` in M(n), or ``(1 - i_h i_{h+1}) / 2``."""
    if not 1 <= h < n:
        raise ValueError(f"idempotent level h={h} needs 1 <= h < n={n}")
    mask = (1 << (h - 1)) | (1 << h)
    return Multicomplex.from_terms(n, {0: 0.5, mask: -0.5 if conjugate else 0.5})


def embed(a: Multicomplex, n: int) -> Multicomplex:
    """View ``a`` as an element of the larger algebra M(n)."""
    if n < a.order:
        raise ValueError(f"cannot embed M({a.order}) into M({n})")
    c = np.zeros(1 << n)
    c[: a.coeffs.size] = a.coeffs
    return Multicomplex(n, c)


def _halves(eta: Multicomplex) -> tuple[np.ndarray, np.ndarray]:
    half = eta.coeffs.size // 2
    return eta.coeffs[:half], eta.coeffs[half:]


def split(eta: Multicomplex) -> IdempotentSplit:
    n = eta.order
    if n < 2:
        raise ValueError(f"idempotent split needs order >= 2, got {n}")
    lo, hi = _halves(eta)
    eta1 = Multicomplex(n - 1, lo)
    eta2_i = Multicomplex(n - 1, hi) * Multicomplex.unit(n - 1, 1 << (n - 2))
    return IdempotentSplit(n - 1, eta1 - eta2_i, eta1 + eta2_i)


def join(s: IdempotentSplit) -> Multicomplex:
    m = s.a.order
    eta1 = (s.a + s.b) * 0.5
    # (b - a) / 2 = eta2 * i_m, and i_m**-1 = -i_m
    eta2 = ((s.b - s.a) * 0.5) * Multicomplex.unit(m, 1 << (m - 1), -1.0)
    return Multicomplex(m + 1, np.concatenate([eta1.coeffs, eta2.coeffs]))


def decompose_full(eta: Multicomplex) -> ComplexVector:
    if eta.order < 2:
        raise ValueError(f"full decomposition needs order >= 2, got {eta.order}")

    def walk(x: Multicomplex) -> list[complex]:
        if x.order == 1:
            return [complex(x.coeffs[0], x.coeffs[1])]
        s = split(x)
        return walk(s.a) + walk(s.b)

    return ComplexVector(eta.order, np.array(walk(eta), dtype=complex))


def recompose_full(v: ComplexVector) -> Multicomplex:
    comps = np.asarray(v.components, dtype=complex)
    if comps.size != 1 << (v.order - 1) or v.order < 2:
        raise ValueError("component count does not match order")

    def build(block: np.ndarray) -> Multicomplex:
        if block.size == 1:
            z = complex(block[0])
            return Multicomplex(1, [z.real, z.imag])
        half = block.size // 2
        return join(IdempotentSplit(0, build(block[:half]), build(block[half:])))

    return build(comps)


@lru_cache(maxsize=None)
def _matrices(n: int) -> tuple[np.ndarray, np.ndarray]:
    size = 1 << n
    dec = np.empty((size, size // 2), dtype=complex)
    for u in range(size):
        dec[u] = decompose_full(Multicomplex.unit(n, u)).components
    rec = np.empty((size, size))
    for k in range(size // 2):
        for part, z in enumerate((1.0, 1j)):
            comps = np.zeros(size // 2, dtype=complex)
            comps[k] = z
            rec[2 * k + part] = recompose_full(ComplexVector(n, comps)).coeffs
    dec.setflags(write=False)
    rec.setflags(write=False)
    return dec, rec


def decomposition_matrix(n: int) -> np.ndarray:
    """Complex matrix ``D`` with ``components = coeffs @ D``, shape ``(2**n, 2**(n-1))``."""
    return _matrices(n)[0]


def decompose_coeffs(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Batched :func:`decompose_full` over the last axis."""
    return np.asarray(coeffs, dtype=float) @ decomposition_matrix(n)


def recompose_coeffs(components: np.ndarray, n: int) -> np.ndarray:
    comps = np.asarray(components, dtype=complex)
    ri = np.stack([comps.real, comps.imag], axis=-1).reshape(*comps.shape[:-1], -1)
    return ri @ _matrices(n)[1]


def norm_identity_residual(eta: Multicomplex) -> float:
    """``| ||eta||**2 - (||a||**2 + ||b||**2) / 2 |`` for the top-level split."""
    s = split(eta)
    return abs(eta.norm() ** 2 - (s.a.norm() ** 2 + s.b.norm() ** 2) / 2)
