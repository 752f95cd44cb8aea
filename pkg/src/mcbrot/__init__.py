"""Multicomplex Multibrot sets: arithmetic, escape-time dynamics, 3D slices."""
from .algebra import Multicomplex, RecursiveMulticomplex, OrderMismatchError, unit_product, square_sign
from .literal import LiteralError, format_literal, parse_literal, parse_unit
from .idempotent import decompose_full, gamma, join, recompose_full, split
from .dynamics import EscapeParams, MembershipResult, member_direct, member_idempotent, orbit, real_axis_interval
from .slices import CaseLabel, UnitTriple, closure_case, predicted_basis, verify_characterization
from .equivalence import (
    AIRBROT,
    OCTAHEDRON,
    build_phi,
    canonical_representative,
    enumerate_classes,
    marginal_affine,
    octahedron_check,
    signature,
)
from .voxel import SliceSpec, VoxelGrid, read_mbv, sample_slice, write_mbv

__version__ = "0.1.0"

__all__ = [
    "Multicomplex",
    "RecursiveMulticomplex",
    "OrderMismatchError",
    "unit_product",
    "square_sign",
    "LiteralError",
    "parse_literal",
    "parse_unit",
    "format_literal",
    "gamma",
    "split",
    "join",
    "decompose_full",
    "recompose_full",
    "EscapeParams",
    "MembershipResult",
    "member_direct",
    "member_idempotent",
    "orbit",
    "real_axis_interval",
    "CaseLabel",
    "UnitTriple",
    "closure_case",
    "predicted_basis",
    "verify_characterization",
    "AIRBROT",
    "OCTAHEDRON",
    "signature",
    "build_phi",
    "canonical_representative",
    "enumerate_classes",
    "octahedron_check",
    "marginal_affine",
    "SliceSpec",
    "VoxelGrid",
    "sample_slice",
    "write_mbv",
    "read_mbv",
]
