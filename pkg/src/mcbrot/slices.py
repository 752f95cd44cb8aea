"""Principal 3D slices and the subspace spanned by their iterates.

For a triple of distinct units ``(im, ik, il)`` the iterates ``Q^m(0)`` with
``c`` in ``span{im, ik, il}`` fill one of three subspaces:

* CASE1 (p even, ``im = 1`` or ``ik il = +-im``): ``span{1, ik, il, ik il}``
* CASE2 (p even otherwise): the 8 products of subsets of the triple
* CASE3 (p odd): ``span{im, ik, il, im ik il}``

``verify_characterization`` checks both directions numerically: no iterate
leaks outside the predicted units, and sampled iterates reach full rank.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .algebra import pow_coeffs, square_sign, unit_name, unit_product
from .dynamics import OVERFLOW_NORM
from .literal import parse_unit

__all__ = [
    "CaseLabel",
    "UnitTriple",
    "IterateSubspace",
    "CharacterizationVerdict",
    "all_triples",
    "is_closed",
    "closure_case",
    "basis_subsets",
    "signed_product",
    "predicted_basis",
    "iterate_span_rank",
    "verify_characterization",
    "RANK_TOL",
    "LEAK_TOL",
]

RANK_TOL = 1e-9
LEAK_TOL = 1e-10


class CaseLabel(enum.Enum):
    CASE1 = 1
    CASE2 = 2
    CASE3 = 3


@dataclass(frozen=True)
class UnitTriple:
    """Three distinct units of I(n); the real unit, if present, is stored first."""

    n: int
    units: tuple[int, int, int]

    def __post_init__(self):
        units = tuple(int(u) for u in self.units)
        if len(units) != 3:
            raise ValueError(f"a triple needs three units, got {len(units)}")
        if len(set(units)) != 3:
            raise ValueError(f"units must be distinct: {units}")
        for u in units:
            if not 0 <= u < (1 << self.n):
                raise ValueError(f"unit {unit_name(u)} exceeds order {self.n}")
        if 0 in units[1:]:
            rest = tuple(u for u in units if u != 0)
            units = (0,) + rest
        object.__setattr__(self, "units", units)

    @classmethod
    def parse(cls, text: str, n: int) -> "UnitTriple":
        """``'1,i1i2,i1i3'`` -> ``UnitTriple(n, (0, 3, 5))``."""
        parts = [s for s in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated units, got {text!r}")
        return cls(n, tuple(parse_unit(s, n) for s in parts))

    @property
    def contains_one(self) -> bool:
        return self.units[0] == 0

    @property
    def squares(self) -> tuple[int, int, int]:
        return tuple(square_sign(u) for u in self.units)

    def __str__(self):
        return "{" + ", ".join(unit_name(u) for u in self.units) + "}"


def all_triples(n: int) -> list[UnitTriple]:
    return [UnitTriple(n, c) for c in combinations(range(1 << n), 3)]


def is_closed(units) -> bool:
    """True when the product of two units is +- the third (for any labeling).

    The product mask is the xor, so this is ``u0 ^ u1 ^ u2 == 0``; the
    condition is symmetric in the three units.
    """
    u0, u1, u2 = units
    return (u0 ^ u1 ^ u2) == 0


def closure_case(t: UnitTriple, p: int) -> CaseLabel:
    if p % 2 == 1:
        return CaseLabel.CASE3
    if t.contains_one or is_closed(t.units):
        return CaseLabel.CASE1
    return CaseLabel.CASE2


_SUBSETS = {
    CaseLabel.CASE1: ((), (1,), (2,), (1, 2)),
    CaseLabel.CASE2: ((), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)),
    CaseLabel.CASE3: ((0,), (1,), (2,), (0, 1, 2)),
}


def basis_subsets(case: CaseLabel) -> tuple[tuple[int, ...], ...]:
    """Which label positions are multiplied together to form each basis unit."""
    return _SUBSETS[case]


def signed_product(units, positions) -> tuple[int, int]:
    sign, mask = 1, 0
    for i in positions:
        s, mask = unit_product(mask, units[i])
        sign *= s
    return sign, mask


def predicted_basis(t: UnitTriple, p: int) -> list[int]:
    case = closure_case(t, p)
    return [signed_product(t.units, s)[1] for s in basis_subsets(case)]


@dataclass(frozen=True)
class IterateSubspace:
    predicted_basis: list[int]
    numeric_rank: int
    sampled_matrix: np.ndarray
    singular_values: np.ndarray


def _sample_iterates(t: UnitTriple, p: int, n_samples: int, orbit_len: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    c = np.zeros((n_samples, 1 << t.n))
    c[:, list(t.units)] = rng.uniform(-0.5, 0.5, size=(n_samples, 3))
    rows = []
    z = c
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(orbit_len):
            if step:
                z = pow_coeffs(z, p) + c
            norms = np.sqrt(np.einsum("ij,ij->i", z, z))
            # Orbits that have run away are cut off; their earlier iterates stay.
            ok = np.isfinite(norms) & (norms > 0) & (norms <= OVERFLOW_NORM)
            rows.append(z[ok] / norms[ok, None])
    return np.concatenate(rows, axis=0)


def iterate_span_rank(
    t: UnitTriple,
    p: int,
    n_samples: int = 50,
    orbit_len: int = 8,
    seed: int = 0,
) -> IterateSubspace:
    if n_samples < 8:
        raise ValueError("n_samples must be >= 8")
    if orbit_len < 3:
        raise ValueError("orbit_len must be >= 3")
    matrix = _sample_iterates(t, p, n_samples, orbit_len, seed)
    if matrix.shape[0] == 0:
        raise ValueError("degenerate sampling: every iterate vanished or overflowed")
    sv = np.linalg.svd(matrix, compute_uv=False)
    if sv[0] == 0:
        raise ValueError("degenerate sampling: all iterates are zero")
    rank = int(np.count_nonzero(sv > RANK_TOL * sv[0]))
    return IterateSubspace(predicted_basis(t, p), rank, matrix, sv)


@dataclass(frozen=True)
class CharacterizationVerdict:
    triple: UnitTriple
    p: int
    case: CaseLabel
    predicted_basis: list[int]
    numeric_rank: int
    leak: float
    passed: bool


def verify_characterization(
    t: UnitTriple,
    p: int,
    n_samples: int = 50,
    orbit_len: int = 8,
    seed: int = 0,
) -> CharacterizationVerdict:
    """Rank must equal the predicted basis size and nothing may leak outside it."""
    sub = iterate_span_rank(t, p, n_samples, orbit_len, seed)
    outside = np.ones(1 << t.n, dtype=bool)
    outside[sub.predicted_basis] = False
    # rows are unit length, so the absolute leak is already relative
    leak = float(np.max(np.abs(sub.sampled_matrix[:, outside]), initial=0.0))
    passed = sub.numeric_rank == len(sub.predicted_basis) and leak <= LEAK_TOL
    return CharacterizationVerdict(
        t, p, closure_case(t, p), sub.predicted_basis, sub.numeric_rank, leak, passed
    )
