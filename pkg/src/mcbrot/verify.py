"""Self-check suites run by ``mcbrot verify``.

Each suite returns a list of :class:`Check` records; a suite passes when every
check does.  All randomness is drawn from generators seeded by ``seed``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np

from .algebra import (
    Multicomplex,
    flat_from_recursive,
    mul_coeffs,
    pow_coeffs,
    recursive_from_flat,
    recursive_mul,
    square_sign,
    unit_product,
)
from .dynamics import (
    EscapeParams,
    escape_counts_direct,
    escape_counts_idempotent,
    orbit,
    real_axis_interval,
    scan_real_axis,
)
from .equivalence import (
    build_phi,
    compose_phi,
    conjugacy_residual,
    enumerate_classes,
    marginal_affine,
    octahedron_check,
)
from .idempotent import decompose_coeffs, gamma, norm_identity_residual, recompose_coeffs
from .slices import all_triples, verify_characterization

__all__ = ["Check", "SUITES", "run_suite"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _rel_err(got: np.ndarray, want: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(want))))
    return float(np.max(np.abs(got - want))) / scale


# --------------------------------------------------------------------------- algebra


def algebra_suite(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    worst = 0.0
    for n in (2, 3, 4):
        for _ in range(200):
            a = Multicomplex(n, rng.uniform(-1, 1, 1 << n))
            b = Multicomplex(n, rng.uniform(-1, 1, 1 << n))
            oracle = flat_from_recursive(recursive_mul(recursive_from_flat(a), recursive_from_flat(b)))
            worst = max(worst, _rel_err((a * b).coeffs, oracle.coeffs))
    out.append(Check("flat product matches recursive oracle", worst <= 1e-12, f"max rel err {worst:.2e}"))

    bad = 0
    for u in range(16):
        for v in range(16):
            sign, w = unit_product(u, v)
            got = flat_from_recursive(
                recursive_mul(
                    recursive_from_flat(Multicomplex.unit(4, u)), recursive_from_flat(Multicomplex.unit(4, v))
                )
            )
            if got != Multicomplex.unit(4, w, float(sign)):
                bad += 1
    out.append(Check("I(4) unit table exact", bad == 0, f"{bad} wrong entries of 256"))

    counts_ok = True
    for n in range(1, 7):
        imag = sum(1 for u in range(1, 1 << n) if square_sign(u) < 0)
        hyp = sum(1 for u in range(1, 1 << n) if square_sign(u) > 0)
        counts_ok &= imag == 2 ** (n - 1) and hyp == 2 ** (n - 1) - 1
    out.append(Check("imaginary/hyperbolic unit counts, n <= 6", counts_ok, ""))

    worst = 0.0
    for n in range(1, 6):
        a, b, c = rng.uniform(-1, 1, (3, 50, 1 << n))
        worst = max(
            worst,
            _rel_err(mul_coeffs(a, b), mul_coeffs(b, a)),
            _rel_err(mul_coeffs(mul_coeffs(a, b), c), mul_coeffs(a, mul_coeffs(b, c))),
            _rel_err(mul_coeffs(a, b + c), mul_coeffs(a, b) + mul_coeffs(a, c)),
        )
    out.append(Check("ring laws, n <= 5", worst <= 1e-12, f"max rel err {worst:.2e}"))
    return out


# --------------------------------------------------------------------------- idempotent


def idempotent_suite(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    exact = True
    for n in (2, 3, 4):
        one = Multicomplex.one(n)
        for h in range(1, n):
            g, gb = gamma(h, n), gamma(h, n, conjugate=True)
            exact &= g * g == g and gb * gb == gb and g * gb == Multicomplex.zero(n) and g + gb == one
    out.append(Check("gamma identities exact", exact, ""))

    a, b = rng.uniform(-1, 1, (2, 1000, 16))
    da, db = decompose_coeffs(a, 4), decompose_coeffs(b, 4)
    worst = max(
        float(np.max(np.abs(decompose_coeffs(a + b, 4) - (da + db)))),
        float(np.max(np.abs(decompose_coeffs(mul_coeffs(a, b), 4) - da * db))),
        float(np.max(np.abs(decompose_coeffs(pow_coeffs(a, 2), 4) - da**2))),
        float(np.max(np.abs(decompose_coeffs(pow_coeffs(a, 3), 4) - da**3))),
    )
    out.append(Check("componentwise add/mul/pow in M(4)", worst <= 1e-12, f"max residual {worst:.2e}"))

    rt = float(np.max(np.abs(recompose_coeffs(da, 4) - a)))
    out.append(Check("recompose(decompose) = id", rt <= 1e-12, f"max residual {rt:.2e}"))

    worst = max(norm_identity_residual(Multicomplex(4, row)) for row in a)
    out.append(Check("norm identity", worst <= 1e-12, f"max residual {worst:.2e}"))
    return out


# --------------------------------------------------------------------------- dynamics


def dynamics_suite(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for p in (2, 3, 4):
        lo, hi = scan_real_axis(p)
        want = real_axis_interval(p)
        err = max(abs(lo - want[0]), abs(hi - want[1]))
        out.append(
            Check(f"real-axis scan p={p}", err <= 2e-3, f"scan [{lo:.4f}, {hi:.4f}] vs [{want[0]:.4f}, {want[1]:.4f}]")
        )

    params = EscapeParams(500)
    for p in (2, 3):
        c = rng.uniform(-0.25, 0.25, (2000, 8))
        a = escape_counts_idempotent(c, 3, p, params.max_iter)
        b = escape_counts_direct(c, 3, p, params)
        deep = params.max_iter // 2
        keep = ~(((a == 0) | (a > deep)) & ((b == 0) | (b > deep)))
        agree = float(np.mean((a[keep] == 0) == (b[keep] == 0))) if keep.any() else 1.0
        out.append(Check(f"direct vs idempotent membership p={p}", agree >= 0.999, f"agreement {agree:.4%}"))

    worst = 0.0
    for p in (2, 3):
        for _ in range(20):
            # components inside |z| <= 0.25 keep every orbit bounded for p = 2, 3
            comps = 0.25 * np.sqrt(rng.uniform(0, 1, 4)) * np.exp(2j * np.pi * rng.uniform(0, 1, 4))
            c = Multicomplex(3, recompose_coeffs(comps, 3))
            orb = orbit(c, p, 20)
            z = np.zeros_like(comps)
            for m in range(20):
                z = z**p + comps
                got = decompose_coeffs(orb[m].coeffs, 3)
                worst = max(worst, float(np.max(np.abs(got - z))))
    out.append(Check("componentwise orbit identity", worst <= 1e-9, f"max residual {worst:.2e}"))
    return out


# --------------------------------------------------------------------------- dims


def dims_suite(seed: int = 0) -> list[Check]:
    out = []
    for n in (3, 4):
        for p in (2, 3, 4, 5):
            verdicts = [verify_characterization(t, p, seed=seed) for t in all_triples(n)]
            failed = [v for v in verdicts if not v.passed]
            leak = max(v.leak for v in verdicts)
            out.append(
                Check(
                    f"characterization n={n} p={p}",
                    not failed,
                    f"{len(verdicts) - len(failed)}/{len(verdicts)} pass, max leak {leak:.1e}",
                )
            )
    return out


# --------------------------------------------------------------------------- equivalence


def equivalent_pairs(n: int, p: int):
    """Every unordered pair of distinct triples of I(n) in the same class, with its map."""
    for cls in enumerate_classes(n, p).classes:
        for t1, t2 in combinations(cls.members, 2):
            yield t1, t2, build_phi(t1, t2, p)


def equiv_suite(seed: int = 0) -> list[Check]:
    out = []
    expected = {(3, 2): (8, 8), (3, 3): (4, 4), (4, 2): (9, 8)}
    for (n, p), (cnt, aff) in expected.items():
        part = enumerate_classes(n, p)
        ok = part.class_count == cnt and part.affine_class_count == aff
        out.append(
            Check(
                f"class count n={n} p={p}",
                ok,
                f"{part.class_count} classes, {part.affine_class_count} up to affine",
            )
        )

    for p in (2, 3):
        worst, missing, pairs = 0.0, 0, 0
        for t1, t2, phi in equivalent_pairs(3, p):
            pairs += 1
            if phi is None:
                missing += 1
                continue
            worst = max(worst, conjugacy_residual(phi, p, 100, seed))
        out.append(
            Check(
                f"conjugacy over I(3) p={p}",
                missing == 0 and worst <= 1e-10,
                f"{pairs} pairs, {missing} without a map, max residual {worst:.1e}",
            )
        )

    laws = True
    triples = all_triples(3)
    for p in (2, 3):
        for t in triples:
            phi = build_phi(t, t, p)
            laws &= phi is not None and phi.is_identity
        for t1, t2 in combinations(triples[:20], 2):
            laws &= (build_phi(t1, t2, p) is None) == (build_phi(t2, t1, p) is None)
        for t1, t2, t3 in combinations(triples[:16], 3):
            a, b = build_phi(t1, t2, p), build_phi(t2, t3, p)
            if a is not None and b is not None:
                laws &= conjugacy_residual(compose_phi(a, b), p, 10, seed) <= 1e-10
    out.append(Check("equivalence laws", laws, "reflexive, symmetric, composable"))
    return out


# --------------------------------------------------------------------------- octahedron


def octa_suite(seed: int = 0) -> list[Check]:
    out = []
    for p in (2, 3, 4):
        v = octahedron_check(p, 33)
        out.append(
            Check(
                f"octahedron p={p}",
                v.passed,
                f"r={v.radius:.6f}, {v.checked} cells checked, {v.mismatches} mismatches",
            )
        )
    for p in (2, 4):
        fit = marginal_affine(p, 33)
        out.append(
            Check(f"marginal affine fit p={p}", fit.residual <= 0.05, f"scale {fit.scale:.4f}, residual {fit.residual:.4f}")
        )
    return out


SUITES: dict[str, Callable[[int], list[Check]]] = {
    "algebra": algebra_suite,
    "idempotent": idempotent_suite,
    "dynamics": dynamics_suite,
    "dims": dims_suite,
    "equiv": equiv_suite,
    "octa": octa_suite,
}


def run_suite(name: str, seed: int = 0) -> list[Check]:
    if name == "all":
        return [c for suite in SUITES.values() for c in suite(seed)]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name](seed)
