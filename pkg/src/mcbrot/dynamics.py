"""Escape-time dynamics of ``Q(eta) = eta**p + c`` over M(n).

Two membership tests are provided.  ``member_idempotent`` splits ``c`` into its
complex components and runs the exact complex escape test on each, which is
the authoritative answer.  ``member_direct`` iterates in M(n) with a norm
bailout and serves as a cross-check.

"Bounded" always means "not escaped within ``max_iter`` iterations".
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .algebra import Multicomplex, OrderMismatchError, pow_coeffs
from .idempotent import decompose_coeffs, decompose_full

__all__ = [
    "Status",
    "Method",
    "EscapeParams",
    "MembershipResult",
    "OVERFLOW_NORM",
    "escape_radius",
    "q_step",
    "orbit",
    "complex_escape_time",
    "escape_time_complex",
    "escape_counts_idempotent",
    "escape_counts_direct",
    "member_idempotent",
    "member_direct",
    "real_axis_interval",
    "scan_real_axis",
]

OVERFLOW_NORM = 1e150


class Status(enum.Enum):
    BOUNDED = "bounded"
    ESCAPED = "escaped"


class Method(enum.Enum):
    DIRECT = "direct"
    IDEMPOTENT = "idempotent"


def escape_radius(p: int) -> float:
    """``2**(1/(p-1))``: the complex Multibrot set lies in this closed disk."""
    if p < 2:
        raise ValueError(f"power must be >= 2, got {p}")
    return 2.0 ** (1.0 / (p - 1))


@dataclass(frozen=True)
class EscapeParams:
    max_iter: int = 500
    escape_radius_direct: float | None = None

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")

    def radius_direct(self, n: int, p: int) -> float:
        """Bailout for the direct test; defaults to ``2 * 2**(1/(p-1)) * sqrt(2**(n-1))``."""
        if self.escape_radius_direct is None:
            return 2.0 * escape_radius(p) * math.sqrt(2.0 ** max(n - 1, 0))
        if self.escape_radius_direct <= escape_radius(p):
            raise ValueError("escape_radius_direct must exceed 2**(1/(p-1))")
        return self.escape_radius_direct


@dataclass(frozen=True)
class MembershipResult:
    status: Status
    escape_iteration: int | None
    method: Method

    @property
    def bounded(self) -> bool:
        return self.status is Status.BOUNDED


def q_step(eta: Multicomplex, c: Multicomplex, p: int) -> Multicomplex:
    if p < 2:
        raise ValueError(f"power must be >= 2, got {p}")
    if eta.order != c.order:
        raise OrderMismatchError(f"orders differ: M({eta.order}) vs M({c.order})")
    return eta**p + c


def orbit(c: Multicomplex, p: int, m: int) -> list[Multicomplex]:
    """``[Q(0), Q^2(0), ..., Q^m(0)]``."""
    if m < 1:
        raise ValueError(f"orbit length must be >= 1, got {m}")
    out = [c]
    for _ in range(m - 1):
        out.append(q_step(out[-1], c, p))
    return out


# --------------------------------------------------------------------------- complex kernels


def _cpow(z, p: int):
    w = z
    for _ in range(p - 1):
        w = w * z
    return w


def complex_escape_time(c: complex, p: int, max_iter: int) -> int:
    """Iteration at which ``|z| > max(2**(1/(p-1)), |c|)``, or 0 if none."""
    radius = max(escape_radius(p), abs(c))
    z = 0j
    for m in range(1, max_iter + 1):
        z = _cpow(z, p) + c
        if abs(z) > radius:
            return m
    return 0


def escape_time_complex(c: np.ndarray, p: int, max_iter: int) -> np.ndarray:
    """Vectorised :func:`complex_escape_time`; returns int32 counts, 0 = bounded."""
    c = np.asarray(c, dtype=complex)
    flat = c.reshape(-1)
    counts = np.zeros(flat.shape, dtype=np.int32)
    radius = np.maximum(escape_radius(p), np.abs(flat))
    idx = np.arange(flat.size)
    z = np.zeros_like(flat)
    cc, rr = flat, radius
    for m in range(1, max_iter + 1):
        if idx.size == 0:
            break
        z = _cpow(z, p) + cc
        out = np.abs(z) > rr
        if out.any():
            counts[idx[out]] = m
            keep = ~out
            idx, z, cc, rr = idx[keep], z[keep], cc[keep], rr[keep]
    return counts.reshape(c.shape)


def _first_escape(component_counts: np.ndarray) -> np.ndarray:
    """Earliest escape over the last axis; 0 only if every component stayed bounded."""
    big = np.iinfo(np.int32).max
    masked = np.where(component_counts > 0, component_counts, big)
    first = masked.min(axis=-1)
    return np.where(first == big, 0, first).astype(np.int32)


def escape_counts_idempotent(coeffs: np.ndarray, n: int, p: int, max_iter: int) -> np.ndarray:
    """Escape counts for a batch of parameters given as ``(..., 2**n)`` coefficients."""
    coeffs = np.asarray(coeffs, dtype=float)
    if n <= 1:
        comps = (coeffs[..., 0] + 1j * (coeffs[..., 1] if n == 1 else 0.0))[..., None]
    else:
        comps = decompose_coeffs(coeffs, n)
    return _first_escape(escape_time_complex(comps, p, max_iter))


def escape_counts_direct(coeffs: np.ndarray, n: int, p: int, params: EscapeParams) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=float)
    lead = coeffs.shape[:-1]
    flat = coeffs.reshape(-1, coeffs.shape[-1])
    radius = params.radius_direct(n, p)
    counts = np.zeros(flat.shape[0], dtype=np.int32)
    idx = np.arange(flat.shape[0])
    z = np.zeros_like(flat)
    cc = flat
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(1, params.max_iter + 1):
            if idx.size == 0:
                break
            z = pow_coeffs(z, p) + cc
            norms = np.sqrt(np.einsum("ij,ij->i", z, z))
            out = ~(norms <= radius) | (norms > OVERFLOW_NORM)
            if out.any():
                counts[idx[out]] = m
                keep = ~out
                idx, z, cc = idx[keep], z[keep], cc[keep]
    return counts.reshape(lead)


# --------------------------------------------------------------------------- membership


def member_idempotent(c: Multicomplex, p: int, params: EscapeParams = EscapeParams()) -> MembershipResult:
    if c.order >= 2:
        comps = decompose_full(c).components
    elif c.order == 1:
        comps = [complex(c.coeffs[0], c.coeffs[1])]
    else:
        comps = [complex(c.coeffs[0])]
    first = None
    for z in comps:
        m = complex_escape_time(complex(z), p, params.max_iter)
        if m and (first is None or m < first):
            first = m
    if first is None:
        return MembershipResult(Status.BOUNDED, None, Method.IDEMPOTENT)
    return MembershipResult(Status.ESCAPED, first, Method.IDEMPOTENT)


def member_direct(c: Multicomplex, p: int, params: EscapeParams = EscapeParams()) -> MembershipResult:
    radius = params.radius_direct(c.order, p)
    z = Multicomplex.zero(c.order)
    for m in range(1, params.max_iter + 1):
        coeffs = pow_coeffs(z.coeffs, p) + c.coeffs
        size = float(np.sqrt(np.dot(coeffs, coeffs)))
        if not size <= radius or size > OVERFLOW_NORM:
            return MembershipResult(Status.ESCAPED, m, Method.DIRECT)
        z = Multicomplex(c.order, coeffs)
    return MembershipResult(Status.BOUNDED, None, Method.DIRECT)


def real_axis_interval(p: int) -> tuple[float, float]:
    """The closed interval of real ``c`` whose orbit stays bounded.

    The right end is the real parabolic point ``(p-1) / p**(p/(p-1))``.  For
    even ``p`` the left end is ``-2**(1/(p-1))``.  For odd ``p`` the map is odd
    in ``z``, so the interval is symmetric: ``[-right, right]``.
    """
    if p < 2:
        raise ValueError(f"power must be >= 2, got {p}")
    right = (p - 1) / p ** (p / (p - 1))
    if p % 2:
        return -right, right
    return -escape_radius(p), right


def scan_real_axis(p: int, step: float = 1e-3, max_iter: int = 2000) -> tuple[float, float]:
    """Smallest and largest bounded real ``c`` on the lattice ``k * step``."""
    bound = escape_radius(p)
    k = np.arange(math.floor(-bound / step) - 5, math.ceil(bound / step) + 6)
    c = k * step
    bounded = escape_time_complex(c.astype(complex), p, max_iter) == 0
    if not bounded.any():
        raise RuntimeError("no bounded point found on the real axis")
    hits = c[bounded]
    return float(hits.min()), float(hits.max())
