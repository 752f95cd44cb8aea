"""Equivalence of principal 3D slices.

Two slices have the same dynamics when a linear bijection between their
iterate subspaces maps one slice onto the other and intertwines
``eta -> eta**p + c``.  Such a map exists when the three units can be paired
with equal squares and the pairing respects the closure case (see
:mod:`mcbrot.slices`).  The map sends each product of labelled units to the
matching product on the other side; on canonical coefficients it is a signed
permutation.

The one slice type with no tricomplex partner is the open all-hyperbolic
triple at even ``p``; it is a regular octahedron and matches the Airbrot
``(1, i1i2, i1i3)`` up to scale and translation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations

import numpy as np

from .algebra import Multicomplex, pow_coeffs, square_sign, unit_name
from .dynamics import EscapeParams, real_axis_interval
from .slices import (
    LEAK_TOL,
    CaseLabel,
    UnitTriple,
    basis_subsets,
    closure_case,
    is_closed,
    signed_product,
)
from .voxel import SliceSpec, VoxelGrid, sample_slice

__all__ = [
    "Signature",
    "PhiMap",
    "AffineFit",
    "MarginalOctahedron",
    "Representative",
    "SliceClass",
    "ClassPartition",
    "OctahedronVerdict",
    "AIRBROT",
    "OCTAHEDRON",
    "signature",
    "build_phi",
    "apply_phi",
    "inverse_phi",
    "compose_phi",
    "conjugacy_residual",
    "canonical_representative",
    "enumerate_classes",
    "octahedron_radius",
    "octahedron_check",
    "fit_affine",
    "marginal_affine",
]

AIRBROT = UnitTriple(3, (0, 0b011, 0b101))
OCTAHEDRON = UnitTriple(4, (0b0011, 0b0101, 0b1001))


# --------------------------------------------------------------------------- signatures


@dataclass(frozen=True)
class Signature:
    """Class descriptor of a triple at a given power.

    For odd ``p`` only the multiset of squares matters, so ``contains_one`` and
    ``closed`` are stored as ``None``.  For even ``p``, ``closed`` is ``None``
    when the triple contains 1.
    """

    p_parity: str
    contains_one: bool | None
    square_signs: tuple[int, ...]
    closed: bool | None

    @property
    def marginal(self) -> bool:
        return (
            self.p_parity == "even"
            and self.contains_one is False
            and self.closed is False
            and all(s == 1 for s in self.square_signs)
        )

    def __str__(self):
        squares = "".join("+" if s > 0 else "-" for s in self.square_signs)
        if self.p_parity == "odd":
            return f"odd [{squares}]"
        if self.contains_one:
            return f"even one [{squares}]"
        return f"even {'closed' if self.closed else 'open'} [{squares}]"


def signature(t: UnitTriple, p: int) -> Signature:
    squares = tuple(sorted(t.squares))
    if p % 2:
        return Signature("odd", None, squares, None)
    if t.contains_one:
        return Signature("even", True, squares, None)
    return Signature("even", False, squares, is_closed(t.units))


# --------------------------------------------------------------------------- conjugacy maps


@dataclass(frozen=True)
class PhiMap:
    """Unit-level conjugacy between two iterate subspaces.

    ``labels`` pairs the triple units position by position; ``pairing`` lists
    ``(source_unit, target_unit, sign)`` over the whole predicted basis.
    """

    source: UnitTriple
    target: UnitTriple
    p: int
    case: CaseLabel
    labels: tuple[tuple[int, int], ...]
    pairing: tuple[tuple[int, int, int], ...]

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and all(s == d and g == 1 for s, d, g in self.pairing)

    def describe(self) -> str:
        return ", ".join(
            f"{unit_name(s)} -> {'-' if g < 0 else ''}{unit_name(d)}" for s, d, g in self.pairing
        )


def _pairing(src, dst, case: CaseLabel) -> tuple[tuple[int, int, int], ...]:
    out = []
    for subset in basis_subsets(case):
        s_sign, s_mask = signed_product(src, subset)
        d_sign, d_mask = signed_product(dst, subset)
        out.append((s_mask, d_mask, s_sign * d_sign))
    return tuple(out)


def build_phi(t1: UnitTriple, t2: UnitTriple, p: int) -> PhiMap | None:
    """First valid pairing of ``t1`` onto a relabelling of ``t2``, or None."""
    case = closure_case(t1, p)
    if closure_case(t2, p) is not case:
        return None
    if case is CaseLabel.CASE1 and t1.contains_one != t2.contains_one:
        return None
    src = t1.units
    squares = t1.squares
    for dst in permutations(t2.units):
        if tuple(square_sign(u) for u in dst) != squares:
            continue
        if case is CaseLabel.CASE1 and t1.contains_one and dst[0] != 0:
            continue
        return PhiMap(t1, t2, p, case, tuple(zip(src, dst)), _pairing(src, dst, case))
    return None


def apply_phi(m: PhiMap, eta: Multicomplex) -> Multicomplex:
    if eta.order != m.source.n:
        raise ValueError(f"map expects M({m.source.n}), got M({eta.order})")
    inside = np.zeros(eta.coeffs.size, dtype=bool)
    inside[[s for s, _, _ in m.pairing]] = True
    leak = float(np.max(np.abs(eta.coeffs[~inside]), initial=0.0))
    if leak > LEAK_TOL * max(1.0, eta.norm()):
        raise ValueError(f"value lies outside the source iterate subspace (leak {leak:.3g})")
    out = np.zeros(1 << m.target.n)
    for s, d, g in m.pairing:
        out[d] = g * eta.coeffs[s]
    return Multicomplex(m.target.n, out)


def inverse_phi(m: PhiMap) -> PhiMap:
    return PhiMap(
        m.target,
        m.source,
        m.p,
        m.case,
        tuple((d, s) for s, d in m.labels),
        tuple((d, s, g) for s, d, g in m.pairing),
    )


def compose_phi(first: PhiMap, second: PhiMap) -> PhiMap:
    """``second`` after ``first``."""
    if first.target != second.source:
        raise ValueError("maps do not chain: first.target != second.source")
    step = {s: (d, g) for s, d, g in second.pairing}
    label = dict(second.labels)
    pairing = tuple((s, step[d][0], g * step[d][1]) for s, d, g in first.pairing)
    labels = tuple((s, label[d]) for s, d in first.labels)
    return PhiMap(first.source, second.target, first.p, first.case, labels, pairing)


def _apply_coeffs(m: PhiMap, coeffs: np.ndarray) -> np.ndarray:
    out = np.zeros(coeffs.shape[:-1] + (1 << m.target.n,))
    src, dst, sgn = (np.array(col) for col in zip(*m.pairing))
    out[..., dst] = coeffs[..., src] * sgn
    return out


def conjugacy_residual(m: PhiMap, p: int, trials: int = 100, seed: int = 0) -> float:
    """Largest ``||phi(Q_c(eta)) - Q_phi(c)(phi(eta))||`` over random draws.

    ``c`` ranges over the source slice and ``eta`` over the source iterate
    subspace, both with coefficients uniform in [-1, 1].
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    size = 1 << m.source.n
    basis = [s for s, _, _ in m.pairing]
    c = np.zeros((trials, size))
    c[:, list(m.source.units)] = rng.uniform(-1.0, 1.0, (trials, 3))
    eta = np.zeros((trials, size))
    eta[:, basis] = rng.uniform(-1.0, 1.0, (trials, len(basis)))
    lhs = _apply_coeffs(m, pow_coeffs(eta, p) + c)
    rhs = pow_coeffs(_apply_coeffs(m, eta), p) + _apply_coeffs(m, c)
    return float(np.sqrt(((lhs - rhs) ** 2).sum(axis=1)).max())


# --------------------------------------------------------------------------- representatives


@dataclass(frozen=True)
class Representative:
    source: UnitTriple
    triple: UnitTriple
    phi: PhiMap


@dataclass(frozen=True)
class MarginalOctahedron:
    """Open all-hyperbolic triple at even ``p``: no tricomplex partner.

    ``phi`` conjugates the source onto ``(i1i2, i1i3, i1i4)``, which is the
    octahedron affinely matching ``airbrot``.
    """

    source: UnitTriple
    triple: UnitTriple
    phi: PhiMap
    airbrot: UnitTriple = AIRBROT


def canonical_representative(t: UnitTriple, p: int) -> Representative | MarginalOctahedron:
    """Lexicographically smallest tricomplex triple with the same signature."""
    sig = signature(t, p)
    if sig.marginal:
        phi = build_phi(t, OCTAHEDRON, p)
        return MarginalOctahedron(t, OCTAHEDRON, phi)
    for combo in combinations(range(8), 3):
        cand = UnitTriple(3, combo)
        if signature(cand, p) == sig:
            phi = build_phi(t, cand, p)
            if phi is not None:
                return Representative(t, cand, phi)
    raise AssertionError(f"no tricomplex triple matches {sig}")


# --------------------------------------------------------------------------- class enumeration


@dataclass
class SliceClass:
    signature: Signature
    representative: UnitTriple
    members: list[UnitTriple] = field(default_factory=list)
    name: str | None = None

    @property
    def count(self) -> int:
        return len(self.members)

    @property
    def marginal(self) -> bool:
        return self.signature.marginal

    @property
    def affine_link(self) -> UnitTriple | None:
        return AIRBROT if self.marginal else None


@dataclass
class ClassPartition:
    n: int
    p: int
    classes: list[SliceClass]

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def affine_class_count(self) -> int:
        """Classes left after folding each marginal class into the Airbrot class."""
        airbrot_sig = signature(AIRBROT, self.p)
        has_airbrot = any(c.signature == airbrot_sig for c in self.classes)
        merged = sum(1 for c in self.classes if c.marginal)
        return self.class_count - (merged if has_airbrot else 0)

    @property
    def triple_count(self) -> int:
        return sum(c.count for c in self.classes)


def enumerate_classes(n: int, p: int) -> ClassPartition:
    if n > 5:
        raise ValueError("class enumeration is limited to n <= 5")
    groups: dict[Signature, SliceClass] = {}
    for combo in combinations(range(1 << n), 3):
        t = UnitTriple(n, combo)
        sig = signature(t, p)
        if sig not in groups:
            groups[sig] = SliceClass(sig, t)
        groups[sig].members.append(t)
    airbrot_sig = signature(AIRBROT, p) if n >= 3 else None
    for cls in groups.values():
        if cls.signature == airbrot_sig:
            cls.name = "Airbrot"
    return ClassPartition(n, p, list(groups.values()))


# --------------------------------------------------------------------------- octahedron


def octahedron_radius(p: int) -> float:
    """``(p - 1) / p**(p/(p-1))``; exactly 0.25 at ``p = 2``."""
    return real_axis_interval(p)[1]


@dataclass(frozen=True)
class OctahedronVerdict:
    p: int
    radius: float
    grid_res: int
    checked: int
    excluded: int
    mismatches: int
    passed: bool

    @property
    def agreement(self) -> float:
        return 1.0 - self.mismatches / self.checked if self.checked else 0.0


def octahedron_check(p: int, grid_res: int = 33, max_iter: int = 500, workers: int = 1) -> OctahedronVerdict:
    """Compare the sampled ``(i1i2, i1i3, i1i4)`` slice with ``|c|_1 <= r``.

    Cells within one grid step (Euclidean) of the octahedron surface are left
    out, since truncated escape times blur a thin shell there.
    """
    if p < 2 or grid_res < 9:
        raise ValueError("octahedron_check needs p >= 2 and grid_res >= 9")
    r = octahedron_radius(p)
    half = r + 0.1
    spec = SliceSpec(p, OCTAHEDRON, ((-half, half),) * 3, (grid_res,) * 3, EscapeParams(max_iter))
    grid = sample_slice(spec, workers)
    pts = grid.world()
    l1 = np.abs(pts).sum(axis=-1)
    predicted = l1 <= r
    step = float(grid.step.max())
    keep = np.abs(l1 - r) / math.sqrt(3.0) > step
    mismatches = int(np.count_nonzero(keep & (predicted != grid.occupancy)))
    checked = int(np.count_nonzero(keep))
    return OctahedronVerdict(
        p, r, grid_res, checked, int(keep.size - checked), mismatches, mismatches == 0
    )


@dataclass(frozen=True)
class AffineFit:
    """``target ~ scale * source + translation``; residual is a voxel mismatch fraction."""

    scale: float
    translation: np.ndarray
    residual: float


def _shape_stats(g: VoxelGrid) -> tuple[np.ndarray, float]:
    pts = g.occupied_points()
    if len(pts) == 0:
        raise ValueError("cannot fit an empty voxel grid")
    centroid = pts.mean(axis=0)
    extent = float(np.abs(pts - centroid).sum(axis=1).max())
    return centroid, extent


def fit_affine(source: VoxelGrid, target: VoxelGrid) -> AffineFit:
    """Uniform scale from 1-norm extents, translation from occupancy centroids.

    The residual maps every target cell centre back into the source grid,
    reads the nearest source voxel, and reports
    ``|predicted XOR actual| / |predicted OR actual|``.
    """
    c_src, e_src = _shape_stats(source)
    c_tgt, e_tgt = _shape_stats(target)
    if e_src == 0 or e_tgt == 0:
        scale = 1.0
    else:
        scale = e_tgt / e_src
    translation = c_tgt - scale * c_src

    back = (target.world() - translation) / scale
    lo = np.array([b[0] for b in source.bounds])
    idx = np.floor((back - lo) / source.step).astype(np.int64)
    res = np.array(source.resolution)
    inside = np.all((idx >= 0) & (idx < res), axis=-1)
    idx = np.clip(idx, 0, res - 1)
    predicted = inside & source.occupancy[idx[..., 2], idx[..., 1], idx[..., 0]]
    actual = target.occupancy
    union = np.count_nonzero(predicted | actual)
    residual = np.count_nonzero(predicted ^ actual) / union if union else 0.0
    return AffineFit(float(scale), translation, float(residual))


def marginal_affine(p: int, grid_res: int = 33, max_iter: int = 500, workers: int = 1) -> AffineFit:
    """Fit the Airbrot voxelisation onto the ``(i1i2, i1i3, i1i4)`` octahedron.

    Both boxes are the shape's real-axis extent widened by the same factor,
    so the two grids have equal relative resolution.
    """
    if p % 2:
        raise ValueError("the marginal case only arises for even p")
    left, right = real_axis_interval(p)
    widen = 1.4
    r = octahedron_radius(p)
    octa = SliceSpec(p, OCTAHEDRON, ((-widen * r, widen * r),) * 3, (grid_res,) * 3, EscapeParams(max_iter))
    mid, half = (left + right) / 2, (right - left) / 2
    air_bounds = ((mid - widen * half, mid + widen * half),) + ((-widen * half, widen * half),) * 2
    air = SliceSpec(p, AIRBROT, air_bounds, (grid_res,) * 3, EscapeParams(max_iter))
    return fit_affine(sample_slice(air, workers), sample_slice(octa, workers))
