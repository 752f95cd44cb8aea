"""Voxel sampling of principal 3D slices and file export.

Sampling is done at cell centres, one z-slab per work unit.  Every cell is
computed by the same elementwise kernel, so the output does not depend on how
slabs are spread over workers.

MBV1 layout (little-endian)::

    offset  size  field
    0       4     magic b"MBV1"
    4       1     version (1)
    5       3     reserved, zero
    8       12    nx, ny, nz as u32
    20      48    xmin, xmax, ymin, ymax, zmin, zmax as f64
    68      1     payload type (1 = u16 escape counts)
    69      ...   nx*ny*nz u16 counts, x fastest, then y, then z
"""
from __future__ import annotations

import csv
import io
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import EscapeParams, escape_counts_idempotent
from .slices import UnitTriple

__all__ = [
    "SliceSpec",
    "VoxelGrid",
    "MBVError",
    "MBV_HEADER_SIZE",
    "sample_slice",
    "write_mbv",
    "read_mbv",
    "export_obj",
    "export_csv_points",
]

MBV_MAGIC = b"MBV1"
MBV_VERSION = 1
MBV_PAYLOAD_U16 = 1
_HEADER = struct.Struct("<4sB3x3I6dB")
MBV_HEADER_SIZE = _HEADER.size  # 69
MAX_CELLS = 2**31


class MBVError(ValueError):
    pass


@dataclass(frozen=True)
class SliceSpec:
    p: int
    triple: UnitTriple
    bounds: tuple[tuple[float, float], ...]
    resolution: tuple[int, int, int]
    params: EscapeParams = field(default_factory=EscapeParams)

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        res = tuple(int(r) for r in self.resolution)
        if len(bounds) != 3 or len(res) != 3:
            raise ValueError("bounds and resolution need three axes")
        if any(not lo < hi for lo, hi in bounds):
            raise ValueError(f"empty bounds: {bounds}")
        if any(r < 2 for r in res):
            raise ValueError(f"each resolution component must be >= 2: {res}")
        if res[0] * res[1] * res[2] > MAX_CELLS:
            raise ValueError(f"resolution overflow: {res} exceeds 2**31 cells")
        if self.params.max_iter > 0xFFFF:
            raise ValueError("max_iter must fit in 16-bit counts")
        if self.p < 2:
            raise ValueError(f"power must be >= 2, got {self.p}")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "resolution", res)


def _centers(lo: float, hi: float, count: int) -> np.ndarray:
    return lo + (np.arange(count) + 0.5) * ((hi - lo) / count)


@dataclass(frozen=True, eq=False)
class VoxelGrid:
    """Escape counts on a 3D grid; ``counts`` has shape ``(nz, ny, nx)``.

    A count of 0 means bounded within the budget, ``k > 0`` means escaped at
    iteration ``k``.
    """

    resolution: tuple[int, int, int]
    bounds: tuple[tuple[float, float], ...]
    counts: np.ndarray
    spec: SliceSpec | None = None

    @property
    def occupancy(self) -> np.ndarray:
        return self.counts == 0

    @property
    def step(self) -> np.ndarray:
        return np.array([(hi - lo) / r for (lo, hi), r in zip(self.bounds, self.resolution)])

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(_centers(lo, hi, r) for (lo, hi), r in zip(self.bounds, self.resolution))

    def world(self) -> np.ndarray:
        """Cell centres, shape ``(nz, ny, nx, 3)`` with (x, y, z) order."""
        xs, ys, zs = self.axes()
        z, y, x = np.meshgrid(zs, ys, xs, indexing="ij")
        return np.stack([x, y, z], axis=-1)

    def occupied_points(self) -> np.ndarray:
        return self.world()[self.occupancy]

    def same_data(self, other: "VoxelGrid") -> bool:
        return (
            self.resolution == other.resolution
            and self.bounds == other.bounds
            and np.array_equal(self.counts, other.counts)
        )


def _slab(spec: SliceSpec, xs: np.ndarray, ys: np.ndarray, zval: float) -> np.ndarray:
    n = spec.triple.n
    y, x = np.meshgrid(ys, xs, indexing="ij")
    coeffs = np.zeros(x.shape + (1 << n,))
    ux, uy, uz = spec.triple.units
    coeffs[..., ux] = x
    coeffs[..., uy] = y
    coeffs[..., uz] = zval
    return escape_counts_idempotent(coeffs, n, spec.p, spec.params.max_iter).astype(np.uint16)


def sample_slice(spec: SliceSpec, workers: int = 1) -> VoxelGrid:
    """Escape counts at every cell centre of the slice box."""
    nx, ny, nz = spec.resolution
    xs, ys, zs = (_centers(lo, hi, r) for (lo, hi), r in zip(spec.bounds, spec.resolution))
    if workers <= 1:
        slabs = [_slab(spec, xs, ys, zv) for zv in zs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            slabs = list(pool.map(lambda zv: _slab(spec, xs, ys, zv), zs))
    counts = np.stack(slabs, axis=0)
    return VoxelGrid(spec.resolution, spec.bounds, counts, spec)


# --------------------------------------------------------------------------- MBV1


def _open(dest, mode):
    if isinstance(dest, (str, Path)):
        return open(dest, mode), True
    return dest, False


def write_mbv(g: VoxelGrid, destination) -> None:
    nx, ny, nz = g.resolution
    flat_bounds = [v for pair in g.bounds for v in pair]
    header = _HEADER.pack(MBV_MAGIC, MBV_VERSION, nx, ny, nz, *flat_bounds, MBV_PAYLOAD_U16)
    payload = np.ascontiguousarray(g.counts, dtype="<u2").tobytes()
    fh, owned = _open(destination, "wb")
    try:
        fh.write(header)
        fh.write(payload)
    finally:
        if owned:
            fh.close()


def read_mbv(source) -> VoxelGrid:
    fh, owned = _open(source, "rb")
    try:
        data = fh.read()
    finally:
        if owned:
            fh.close()
    if len(data) < 4 or data[:4] != MBV_MAGIC:
        raise MBVError("bad magic")
    if len(data) < MBV_HEADER_SIZE:
        raise MBVError("truncated payload: incomplete header")
    magic, version, nx, ny, nz, *rest = _HEADER.unpack_from(data)
    bounds_flat, payload_type = rest[:6], rest[6]
    if version != MBV_VERSION:
        raise MBVError(f"version mismatch: file has {version}, expected {MBV_VERSION}")
    if payload_type != MBV_PAYLOAD_U16:
        raise MBVError(f"unsupported payload type {payload_type}")
    expected = MBV_HEADER_SIZE + 2 * nx * ny * nz
    if len(data) < expected:
        raise MBVError(f"truncated payload: {len(data)} bytes, expected {expected}")
    if len(data) > expected:
        raise MBVError(f"trailing data: {len(data)} bytes, expected {expected}")
    counts = np.frombuffer(data, dtype="<u2", offset=MBV_HEADER_SIZE).reshape(nz, ny, nx)
    bounds = tuple(zip(bounds_flat[0::2], bounds_flat[1::2]))
    return VoxelGrid((nx, ny, nz), bounds, counts.astype(np.uint16))


# --------------------------------------------------------------------------- OBJ / CSV

_CUBE_CORNERS = np.array(
    [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]],
    dtype=float,
)
# 1-based within a cube, outward-facing triangles
_CUBE_FACES = np.array(
    [
        [1, 3, 2], [1, 4, 3],  # bottom
        [5, 6, 7], [5, 7, 8],  # top
        [1, 2, 6], [1, 6, 5],  # front
        [4, 8, 7], [4, 7, 3],  # back
        [1, 5, 8], [1, 8, 4],  # left
        [2, 3, 7], [2, 7, 6],  # right
    ]
)


def _write_text(destination, text: str) -> None:
    fh, owned = _open(destination, "w")
    try:
        fh.write(text)
    finally:
        if owned:
            fh.close()


def export_obj(g: VoxelGrid, destination, mode: str = "occupancy") -> None:
    """One axis-aligned cube (8 vertices, 12 triangles) per occupied voxel."""
    if mode != "occupancy":
        raise ValueError(f"unsupported OBJ mode {mode!r}")
    centers = g.occupied_points()
    step = g.step
    out = io.StringIO()
    out.write(f"# {len(centers)} occupied voxels\n")
    for c in centers:
        for corner in c - step / 2 + _CUBE_CORNERS * step:
            out.write("v %.10g %.10g %.10g\n" % tuple(corner))
    for k in range(len(centers)):
        for face in _CUBE_FACES + 8 * k:
            out.write("f %d %d %d\n" % tuple(face))
    _write_text(destination, out.getvalue())


def export_csv_points(g: VoxelGrid, destination) -> None:
    """``x,y,z,count`` rows for occupied voxels."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["x", "y", "z", "count"])
    world = g.world()
    occ = g.occupancy
    for (x, y, z), cnt in zip(world[occ], g.counts[occ]):
        writer.writerow([repr(float(x)), repr(float(y)), repr(float(z)), int(cnt)])
    _write_text(destination, out.getvalue())
