"""Command-line interface: ``mcbrot <command> [flags]``.

Exit codes: 0 success or pass, 1 failure or fail, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .dynamics import EscapeParams, member_direct, member_idempotent, real_axis_interval, scan_real_axis
from .equivalence import (
    AIRBROT,
    MarginalOctahedron,
    canonical_representative,
    enumerate_classes,
    octahedron_check,
    signature,
)
from .literal import LiteralError, parse_literal
from .slices import UnitTriple, all_triples, closure_case, verify_characterization
from .verify import SUITES, run_suite
from .voxel import SliceSpec, export_csv_points, export_obj, sample_slice, write_mbv

__all__ = ["run", "main", "build_parser"]

DEFAULT_BOUNDS = "-2.1:2.1,-2.1:2.1,-2.1:2.1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcbrot", description="Multicomplex Multibrot sets and their principal 3D slices.")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(name, help, *flags):
        p = sub.add_parser(name, help=help)
        common = {
            "p": lambda: p.add_argument("--p", type=int, default=2, help="power of z**p + c (default 2)"),
            "n": lambda: p.add_argument("--n", type=int, default=None, help="multicomplex order"),
            "max_iter": lambda: p.add_argument("--max-iter", type=int, default=500, help="iteration budget (default 500)"),
            "seed": lambda: p.add_argument("--seed", type=int, default=0, help="random seed (default 0)"),
            "json": lambda: p.add_argument("--json", action="store_true", help="emit JSON lines"),
            "threads": lambda: p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)"),
            "triple": lambda: p.add_argument("--triple", default=None, help='units, e.g. "1,i1i2,i1i3"'),
        }
        for f in flags:
            common[f]()
        return p

    p = add("member", "membership of one parameter c", "p", "n", "max_iter", "json")
    p.add_argument("--c", required=True, help='multicomplex literal, e.g. "0.1+0.2*i1"')

    p = add("axis", "bounded interval on the real axis", "p", "max_iter", "json")
    p.add_argument("--step", type=float, default=1e-3, help="scan step (default 1e-3)")
    p.set_defaults(max_iter=2000)

    add("dims", "iterate-subspace dimension check", "p", "n", "seed", "triple", "json")
    add("classify", "signature classes of all triples of I(n)", "p", "n", "json")
    add("canon", "tricomplex representative of a triple", "p", "n", "triple", "json")

    p = add("render", "voxelise a principal 3D slice", "p", "n", "max_iter", "threads", "triple", "json")
    p.add_argument("--res", default="33,33,33", help="NX,NY,NZ or a single N (default 33)")
    p.add_argument("--bounds", default=DEFAULT_BOUNDS, help=f'"x0:x1,y0:y1,z0:z1" (default "{DEFAULT_BOUNDS}")')
    p.add_argument("--out", default=None, help="MBV1 output path")
    p.add_argument("--obj", default=None, help="OBJ output path")
    p.add_argument("--csv", default=None, help="CSV point output path")

    p = add("octa", "octahedron check of (i1i2, i1i3, i1i4)", "p", "max_iter", "threads", "json")
    p.add_argument("--res", default="33", help="grid resolution (default 33)")

    p = add("verify", "run self-check suites", "seed", "json")
    p.add_argument("--suite", default="all", choices=[*SUITES, "all"], help="suite name (default all)")
    return parser


# --------------------------------------------------------------------------- flag parsing


def _resolution(text: str) -> tuple[int, int, int]:
    try:
        parts = [int(s) for s in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --res {text!r}") from None
    if len(parts) == 1:
        parts *= 3
    if len(parts) != 3:
        raise UsageError(f"--res needs 1 or 3 integers, got {text!r}")
    return tuple(parts)


def _bounds(text: str) -> tuple[tuple[float, float], ...]:
    try:
        out = tuple(tuple(float(v) for v in axis.split(":")) for axis in text.split(","))
    except ValueError:
        raise UsageError(f"bad --bounds {text!r}") from None
    if len(out) != 3 or any(len(b) != 2 for b in out):
        raise UsageError(f'--bounds needs "x0:x1,y0:y1,z0:z1", got {text!r}')
    return out


def _triple(text: str | None, n: int | None, default: UnitTriple | None = None) -> UnitTriple:
    if text is None:
        if default is None:
            raise UsageError("--triple is required")
        if n is not None and n != default.n:
            return UnitTriple(n, default.units)
        return default
    try:
        if n is None:
            # smallest order (at least 3) holding every unit named
            loose = UnitTriple.parse(text, 64)
            n = max(3, max(u.bit_length() for u in loose.units))
        return UnitTriple.parse(text, n)
    except ValueError as exc:
        raise UsageError(f"bad --triple: {exc}") from None


def _status(res) -> str:
    return "bounded" if res.bounded else f"escaped at iteration {res.escape_iteration}"


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True))


# --------------------------------------------------------------------------- commands


def cmd_member(args) -> int:
    n = 3 if args.n is None else args.n
    try:
        c = parse_literal(args.c, n)
    except LiteralError as exc:
        raise UsageError(f"bad --c: {exc}") from None
    params = EscapeParams(args.max_iter)
    idem = member_idempotent(c, args.p, params)
    direct = member_direct(c, args.p, params)
    if args.json:
        _emit(
            {
                "c": args.c,
                "n": n,
                "p": args.p,
                "status": idem.status.value,
                "escape_iteration": idem.escape_iteration,
                "direct_status": direct.status.value,
                "direct_escape_iteration": direct.escape_iteration,
            }
        )
    else:
        print(_status(idem))
        print(f"idempotent: {_status(idem)}")
        print(f"direct:     {_status(direct)}")
    return 0


def cmd_axis(args) -> int:
    lo, hi = scan_real_axis(args.p, args.step, args.max_iter)
    left, right = real_axis_interval(args.p)
    if args.json:
        _emit({"p": args.p, "scan": [lo, hi], "closed_form": [left, right]})
    else:
        print(f"[{lo:.3f}, {hi:.3f}]")
        print(f"closed form: [{left:.6f}, {right:.6f}]")
    return 0


def cmd_dims(args) -> int:
    n = 3 if args.n is None else args.n
    if args.triple is not None:
        triples = [_triple(args.triple, args.n)]
    else:
        triples = all_triples(n)
    failed = 0
    for t in triples:
        v = verify_characterization(t, args.p, seed=args.seed)
        failed += not v.passed
        if args.json:
            _emit(
                {
                    "triple": str(t),
                    "p": args.p,
                    "case": v.case.name,
                    "rank": v.numeric_rank,
                    "predicted": len(v.predicted_basis),
                    "leak": v.leak,
                    "passed": v.passed,
                }
            )
        elif len(triples) == 1 or not v.passed:
            print(f"{t}  {v.case.name}  rank {v.numeric_rank}/{len(v.predicted_basis)}  leak {v.leak:.1e}  "
                  f"{'pass' if v.passed else 'FAIL'}")
    if not args.json:
        print(f"{len(triples) - failed}/{len(triples)} pass")
    return 1 if failed else 0


def cmd_classify(args) -> int:
    n = 3 if args.n is None else args.n
    try:
        part = enumerate_classes(n, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        for cls in part.classes:
            _emit(
                {
                    "n": n,
                    "p": args.p,
                    "signature": str(cls.signature),
                    "representative": str(cls.representative),
                    "count": cls.count,
                    "name": cls.name,
                    "marginal": cls.marginal,
                    "affine_link": str(cls.affine_link) if cls.affine_link else None,
                }
            )
        return 0
    print(f"{part.class_count} classes ({part.affine_class_count} up to affine) over {part.triple_count} triples")
    for cls in part.classes:
        line = f"  {str(cls.signature):<22} {cls.count:>5}  e.g. {cls.representative}"
        if cls.name:
            line += f"  [{cls.name}]"
        if cls.marginal:
            line += f"  (affine to {cls.affine_link})"
        print(line)
    return 0


def cmd_canon(args) -> int:
    t = _triple(args.triple, args.n)
    rep = canonical_representative(t, args.p)
    marginal = isinstance(rep, MarginalOctahedron)
    if args.json:
        _emit(
            {
                "triple": str(t),
                "p": args.p,
                "signature": str(signature(t, args.p)),
                "representative": str(rep.triple),
                "marginal": marginal,
                "phi": rep.phi.describe(),
            }
        )
        return 0
    print(f"{t}  p={args.p}  {signature(t, args.p)}  {closure_case(t, args.p).name}")
    if marginal:
        print(f"marginal octahedron: {rep.triple} (order 4), affine to {rep.airbrot}")
    else:
        print(f"representative: {rep.triple}")
    print(f"phi: {rep.phi.describe()}")
    return 0


def cmd_render(args) -> int:
    t = _triple(args.triple, args.n, AIRBROT)
    try:
        spec = SliceSpec(args.p, t, _bounds(args.bounds), _resolution(args.res), EscapeParams(args.max_iter))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    grid = sample_slice(spec, max(1, args.threads))
    if args.out:
        write_mbv(grid, args.out)
    if args.obj:
        export_obj(grid, args.obj)
    if args.csv:
        export_csv_points(grid, args.csv)
    occupied = int(grid.occupancy.sum())
    if args.json:
        _emit({"triple": str(t), "p": args.p, "resolution": list(spec.resolution), "occupied": occupied})
    else:
        nx, ny, nz = spec.resolution
        print(f"{t}  p={args.p}  {nx}x{ny}x{nz}  occupied {occupied}/{grid.counts.size}")
    return 0


def cmd_octa(args) -> int:
    res = _resolution(args.res)[0]
    try:
        v = octahedron_check(args.p, res, args.max_iter, max(1, args.threads))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        _emit(
            {
                "p": args.p,
                "radius": v.radius,
                "checked": v.checked,
                "excluded": v.excluded,
                "mismatches": v.mismatches,
                "passed": v.passed,
            }
        )
    else:
        print(f"radius {v.radius:.6f}  checked {v.checked}  excluded {v.excluded}  mismatches {v.mismatches}")
        print("pass" if v.passed else "FAIL")
    return 0 if v.passed else 1


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, args.seed)
    for c in checks:
        if args.json:
            _emit({"check": c.name, "passed": c.passed, "detail": c.detail})
        else:
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {c.detail}".rstrip())
    ok = all(c.passed for c in checks)
    if not args.json:
        print(f"{sum(c.passed for c in checks)}/{len(checks)} checks pass")
    return 0 if ok else 1


COMMANDS = {
    "member": cmd_member,
    "axis": cmd_axis,
    "dims": cmd_dims,
    "classify": cmd_classify,
    "canon": cmd_canon,
    "render": cmd_render,
    "octa": cmd_octa,
    "verify": cmd_verify,
}


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "p", 2) < 2:
            raise UsageError("--p must be >= 2")
        if getattr(args, "max_iter", 1) < 1:
            raise UsageError("--max-iter must be >= 1")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main() -> int:
    return run(sys.argv[1:])
