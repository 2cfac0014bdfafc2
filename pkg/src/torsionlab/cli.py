"""Command-line front end.

Exit codes: 0 success, 1 bad input, 2 singular curve, 3 conformance failure
(a violated classification rule under --strict, or a failed reference row).
"""
from __future__ import annotations

import argparse
import json
import sys
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from .curve import Curve, EmptyGeneration, SingularCurve, canonical_model, gen_curves, isomorphism_key
from .dioph import DEFAULT_BOUNDS, run_search, systems
from .growth import (
    DEFAULT_EXTRA_HEIGHT,
    ConformanceViolation,
    analyze,
    candidate_extensions,
    check_tables,
    shape_rules,
    twist_shapes,
)
from .numfield import SUPPORTED_D, ParseError, enumerate_ok, nonsquare_classes, parse_elem, quad_field, same_class
from .torsion import TorsionShape, torsion_over_k

EXIT_OK, EXIT_PARSE, EXIT_SINGULAR, EXIT_CONFORMANCE = 0, 1, 2, 3

_VALUE_FLAGS = {"--D", "--M", "--N", "--shape", "--system", "--table", "--height", "--bound", "--count", "--jobs", "--out"}


def _normalize_argv(argv: Sequence[str]) -> list[str]:
    """Glue values that start with '-' (like -1/2+1/2*w) onto their flag."""
    out: list[str] = []
    i = 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1] not in _VALUE_FLAGS:
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _field(value: str) -> int:
    D = int(value)
    if D not in SUPPORTED_D:
        raise argparse.ArgumentTypeError(f"D must be one of {SUPPORTED_D}")
    return D


def _shape(value: str) -> TorsionShape:
    try:
        return TorsionShape.parse(value)
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"shape must look like 2x8, got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torsionlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def curve_args(sp):
        sp.add_argument("--D", type=_field, required=True)
        sp.add_argument("--M", required=True)
        sp.add_argument("--N", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--strict", action="store_true")
        sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("analyze", help="torsion, growth and twists of one curve")
    curve_args(sp)
    common(sp)
    sp.add_argument("--height", type=int, default=DEFAULT_EXTRA_HEIGHT, help="extra twist scan height outside D=-1,-3")

    sp = sub.add_parser("tables", help="check the reference example tables")
    sp.add_argument("--table", default="all", choices=["3", "4", "5", "6", "all"])
    common(sp)

    sp = sub.add_parser("twists", help="shapes of quadratic twists")
    curve_args(sp)
    common(sp)
    sp.add_argument("--height", type=int, default=3)

    sp = sub.add_parser("gen", help="generate curves with a given torsion shape")
    sp.add_argument("--D", type=_field, required=True)
    sp.add_argument("--shape", type=_shape, required=True)
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--height", type=int, default=5)
    common(sp)

    sp = sub.add_parser("dioph", help="bounded-height Diophantine searches")
    sp.add_argument("--system", required=True, choices=list(systems()))
    sp.add_argument("--D", type=_field, required=True)
    sp.add_argument("--bound", type=int, default=None)
    sp.add_argument("--out", default=None, help="write the certificate (with timing) here")
    common(sp)

    sp = sub.add_parser("scan", help="analyze every curve with small coefficients")
    sp.add_argument("--D", type=_field, required=True)
    sp.add_argument("--height", type=int, default=3)
    common(sp)
    return p


# ---------------------------------------------------------------------------


def _read_curve(args) -> Curve:
    return Curve(args.D, parse_elem(args.M, args.D), parse_elem(args.N, args.D))


def _emit(obj, as_json: bool, text: str) -> None:
    if as_json:
        print(json.dumps(obj, indent=2))
    else:
        print(text)


def cmd_analyze(args) -> int:
    E = _read_curve(args)
    rep = analyze(E, strict=False, extra_height=args.height)
    _emit(rep.to_dict(), args.json, rep.render())
    for v in rep.violations:
        print(f"warning: {v}", file=sys.stderr)
    if rep.violations and args.strict:
        return EXIT_CONFORMANCE
    return EXIT_OK


def cmd_tables(args) -> int:
    rows = check_tables(None if args.table == "all" else [args.table])
    ok = all(r.passed for r in rows)
    obj = {
        "rows": [{"table": r.table, "row": r.label, "pass": r.passed, "detail": r.detail} for r in rows],
        "passed": sum(r.passed for r in rows),
        "total": len(rows),
    }
    text = "\n".join(r.line() for r in rows) + f"\n{obj['passed']}/{obj['total']} rows pass"
    _emit(obj, args.json, text)
    return EXIT_OK if ok else EXIT_CONFORMANCE


def cmd_twists(args) -> int:
    E = _read_curve(args)
    ds = list(candidate_extensions(E))
    for c in nonsquare_classes(E.field, args.height):
        if not any(same_class(c.rep, d.rep) for d in ds):
            ds.append(c)
    recs = twist_shapes(E, ds, strict=False)
    G = torsion_over_k(E)
    rules = shape_rules(E.D, G) if E.field.theorem_field else None
    bad = [r for r in recs if rules is not None and r.shape not in rules.twists]
    obj = {"field": E.D, "M": str(E.M), "N": str(E.N), "shape_K": [G.m, G.n], "twists": [r.to_dict() for r in recs]}
    text = "\n".join([f"E({E.M},{E.N}) over D={E.D}: {G.presentation()}"] + [f"  d={r.d}: {r.shape.presentation()}" for r in recs])
    _emit(obj, args.json, text)
    for r in bad:
        print(f"warning: twist by {r.d} has {r.shape}, outside the allowed list for {G}", file=sys.stderr)
    return EXIT_CONFORMANCE if bad and args.strict else EXIT_OK


def cmd_gen(args) -> int:
    try:
        curves = gen_curves(args.shape, args.D, args.height, args.count)
    except EmptyGeneration as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    rows = []
    for E in curves:
        shape = torsion_over_k(E)
        rows.append({"M": str(E.M), "N": str(E.N), "shape": [shape.m, shape.n], "verified": shape == args.shape})
    text = "\n".join(f"E({r['M']},{r['N']})@{args.D}  {args.shape.presentation()}  verified={r['verified']}" for r in rows)
    _emit({"field": args.D, "shape": [args.shape.m, args.shape.n], "curves": rows}, args.json, text)
    return EXIT_OK if all(r["verified"] for r in rows) else EXIT_CONFORMANCE


def cmd_dioph(args) -> int:
    res = run_search(args.system, args.D, args.bound, args.jobs)
    if args.out:
        res.write_certificate(args.out)
    cert = res.certificate(timing=False)
    text = (
        f"{cert['system']} over D={cert['field']}, height <= {cert['bound']}: "
        f"{len(cert['solutions'])} solution(s), {cert['scanned']} scanned"
    )
    if cert["solutions"]:
        text += "\n" + "\n".join("  " + ", ".join(s) for s in cert["solutions"])
    _emit(cert, args.json, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# scan


def scan_curves(D: int, H: int) -> list[Curve]:
    """One model per K-isomorphism class among E(M,N) with M, N of height <= H."""
    K = quad_field(D)
    elems = [x for x in enumerate_ok(K, H) if x]
    seen: dict[tuple, Curve] = {}
    for M in elems:
        for N in elems:
            if M == N:
                continue
            E = Curve(D, M, N)
            key = isomorphism_key(E)
            if key not in seen:
                seen[key] = canonical_model(E)
    return [seen[k] for k in sorted(seen)]


def _scan_one(E: Curve) -> dict:
    rep = analyze(E, strict=False, with_twists=True)
    return {
        "M": str(E.M),
        "N": str(E.N),
        "shape": str(rep.shape_K),
        "g": rep.g,
        "growth": [str(r.shape) for r in rep.growth],
        "violations": rep.violations,
    }


def run_scan(D: int, H: int, jobs: int = 1) -> dict:
    curves = scan_curves(D, H)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_one, curves, chunksize=max(1, len(curves) // (8 * jobs))))
    else:
        results = [_scan_one(E) for E in curves]
    by_shape: dict[str, dict] = defaultdict(lambda: {"curves": 0, "g": Counter(), "transitions": Counter()})
    violations = []
    for r in results:
        entry = by_shape[r["shape"]]
        entry["curves"] += 1
        entry["g"][r["g"]] += 1
        for s in r["growth"]:
            entry["transitions"][s] += 1
        violations.extend(r["violations"])
    shapes = {}
    for shape in sorted(by_shape, key=lambda s: TorsionShape.parse(s)):
        e = by_shape[shape]
        shapes[shape] = {
            "curves": e["curves"],
            "g": {str(k): e["g"][k] for k in sorted(e["g"])},
            "transitions": {k: e["transitions"][k] for k in sorted(e["transitions"], key=TorsionShape.parse)},
        }
    return {"field": D, "height": H, "curves": len(curves), "shapes": shapes, "max_g": max((r["g"] for r in results), default=0), "violations": violations}


def cmd_scan(args) -> int:
    summary = run_scan(args.D, args.height, args.jobs)
    lines = [f"D={summary['field']} height<={summary['height']}: {summary['curves']} curves up to isomorphism"]
    for shape, e in summary["shapes"].items():
        trans = ", ".join(f"{k}:{v}" for k, v in e["transitions"].items()) or "-"
        g = ", ".join(f"g={k}:{v}" for k, v in e["g"].items())
        lines.append(f"  {shape:<5} {e['curves']:>6} curves  {g}  growth to {trans}")
    lines.append(f"  max g = {summary['max_g']}")
    lines.append(f"  violations: {len(summary['violations'])}")
    lines.extend(f"    {v}" for v in summary["violations"])
    _emit(summary, args.json, "\n".join(lines))
    return EXIT_CONFORMANCE if summary["violations"] and args.strict else EXIT_OK


_COMMANDS = {
    "analyze": cmd_analyze,
    "tables": cmd_tables,
    "twists": cmd_twists,
    "gen": cmd_gen,
    "dioph": cmd_dioph,
    "scan": cmd_scan,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = _normalize_argv(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    try:
        return _COMMANDS[args.command](args)
    except SingularCurve as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConformanceViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFORMANCE


if __name__ == "__main__":
    sys.exit(main())
