"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary, then asserts, so a failure shows up both ways."""
from __future__ import annotations

import hashlib
import io
import json
import time
from contextlib import redirect_stdout

import pytest

from conftest import record_criterion, sample_curves
from helpers import division_levels
from torsionlab.cli import main, run_scan
from torsionlab.curve import Point, gen_curves, new_curve
from torsionlab.dioph import enumerate_aux_points, search_fermat, search_s23, search_s33
from torsionlab.growth import analyze, candidate_extensions, check_tables, load_tables, shape_rules, twist_shapes
from torsionlab.numfield import QuadExt, nonsquare_classes, parse_elem, quad_field, same_class
from torsionlab.torsion import (
    TorsionShape,
    halve,
    lifts_in,
    torsion_of_twist,
    torsion_over_ext,
    torsion_over_k,
    two_power_subgroup,
)

S = TorsionShape.parse
K1, K3 = quad_field(-1), quad_field(-3)

# digests of every output the criteria produce; criterion 9 recomputes them
_DIGESTS: dict[str, str] = {}


def _digest(name: str, obj) -> str:
    h = hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()
    _DIGESTS[name] = h
    return h


def _rows_summary(rows):
    return [(r.table, r.label, r.passed, r.detail) for r in rows]


# -- 1-3: reference tables -----------------------------------------------------


def test_criterion_1_gaussian_growth_table():
    start = time.perf_counter()
    rows = check_tables(["3"])
    elapsed = time.perf_counter() - start
    failed = [r.line() for r in rows if not r.passed]
    stored = len(load_tables()["growth_tables"]["3"]["rows"])
    ok = not failed and len(rows) == stored == 10 and elapsed < 60
    _digest("table3", _rows_summary(rows))
    record_criterion(1, ok, f"{len(rows) - len(failed)}/{len(rows)} rows in {elapsed:.1f}s")
    assert ok, failed


def test_criterion_2_eisenstein_growth_table():
    start = time.perf_counter()
    rows = check_tables(["4"])
    elapsed = time.perf_counter() - start
    failed = [r.line() for r in rows if not r.passed]
    rep = analyze(new_curve(-3, -1, K3.lam))
    irrational = any(same_class(r.d.rep, -K3.w) and r.shape == S("2x6") for r in rep.growth)
    ok = not failed and len(rows) == 9 and irrational and elapsed < 60
    _digest("table4", _rows_summary(rows))
    record_criterion(2, ok, f"{len(rows) - len(failed)}/{len(rows)} rows in {elapsed:.1f}s; class(-sqrt-3) growth {irrational}")
    assert ok, failed


def test_criterion_3_extension_tables():
    start = time.perf_counter()
    rows = check_tables(["5", "6"])
    failed = [r.line() for r in rows if not r.passed]
    data = load_tables()
    pairs = {"5": "3", "6": "4"}
    mismatches = []
    linked = 0
    for ext_id, growth_id in pairs.items():
        D = data["extension_tables"][ext_id]["D"]
        for row in data["extension_tables"][ext_id]["rows"]:
            M, N = parse_elem(row["M"], D), parse_elem(row["N"], D)
            d, shape = parse_elem(row["d"], D), S(row["shape_L"])
            for grow in data["growth_tables"][growth_id]["rows"]:
                if (parse_elem(grow["M"], D), parse_elem(grow["N"], D)) != (M, N):
                    continue
                linked += 1
                if not any(same_class(d, parse_elem(gd, D)) and S(gs) == shape for gd, gs in grow["growth"]):
                    mismatches.append(f"table {ext_id} {row['M']},{row['N']} d={row['d']}")
    elapsed = time.perf_counter() - start
    ok = not failed and not mismatches and linked >= 5 and same_class(K3(3), K3(-1)) and elapsed < 30
    _digest("table56", _rows_summary(rows))
    record_criterion(3, ok, f"{len(rows) - len(failed)}/{len(rows)} rows, {linked} cross-links consistent, {elapsed:.1f}s")
    assert ok, failed + mismatches


# -- 4: the order-16 example ----------------------------------------------------


def test_criterion_4_order16_example():
    start = time.perf_counter()
    K = quad_field(-7)
    u, v = K.parse("1/2-3/2*w"), K.parse("-3-w")
    E = new_curve(-7, u ** 4, v ** 4)
    G = torsion_over_k(E)
    GL = torsion_over_ext(E, K.parse("465/2+45/2*w"))
    elapsed = time.perf_counter() - start
    ok = G == S("2x8") and GL == S("2x16") and elapsed < 30
    _digest("order16", [str(G), str(GL)])
    record_criterion(4, ok, f"E(K)={G.presentation()}, E(L)={GL.presentation()} in {elapsed:.1f}s")
    assert ok


# -- 5: twist sweep ------------------------------------------------------------


def test_criterion_5_twist_sweep():
    bad, total, curves = [], 0, 0
    summary = []
    for D in (-1, -3):
        ds = nonsquare_classes(quad_field(D), 6)
        sample = sample_curves(D, 100)
        curves += len(sample)
        assert len(sample) >= 100
        for E in sample:
            G = torsion_over_k(E)
            allowed = shape_rules(D, G).twists
            cands = candidate_extensions(E)
            extra = [d for d in ds if not any(same_class(d.rep, c.rep) for c in cands)]
            for rec in twist_shapes(E, cands + extra, strict=False):
                total += 1
                if rec.shape not in allowed:
                    bad.append(f"{E} twist {rec.d}: {rec.shape}")
                if G in (S("2x8"), S("2x6"), S("4x4")) and rec.shape != S("2x2"):
                    bad.append(f"{E} twist {rec.d}: {rec.shape} (expected C2+C2)")
                summary.append((str(E), str(rec.d), str(rec.shape)))
    _digest("twists", summary)
    record_criterion(5, not bad, f"{curves} curves, {total} twists, {len(bad)} violations")
    assert not bad, bad[:10]


# -- 6: theorem bounds over the height-5 scan and generated order-8 curves ------------


@pytest.fixture(scope="module")
def scans():
    return {D: run_scan(D, 5) for D in (-1, -3)}


def test_criterion_6_theorem_bounds(scans):
    problems = []
    for D, summ in scans.items():
        problems += summ["violations"]
        if summ["max_g"] > 3:
            problems.append(f"D={D}: max g {summ['max_g']}")
        if D == -3 and "4x4" in summ["shapes"]:
            problems.append("C4+C4 over K for D=-3")
    order8 = {D: gen_curves((2, 8), D, 6, count=12) for D in (-1, -3)}
    for D, curves in order8.items():
        for E in curves:
            rep = analyze(E, strict=False)
            problems += rep.violations
            if D == -3 and rep.g:
                problems.append(f"{E} grows over D=-3")
            if D == -1 and (rep.g > 1 or any(r.shape != S("4x8") for r in rep.growth)):
                problems.append(f"{E} growth {[str(r.shape) for r in rep.growth]}")
    _digest("scan", scans)
    counts = ", ".join(f"D={D}: {s['curves']} curves, max g {s['max_g']}" for D, s in scans.items())
    n8 = sum(len(c) for c in order8.values())
    record_criterion(6, not problems, f"{counts}; {n8} generated C2+C8 curves; {len(problems)} violations")
    assert not problems, problems[:10]


# -- 7: structural invariants ----------------------------------------------------


def _odd(n: int) -> int:
    while n % 2 == 0:
        n //= 2
    return n


def test_criterion_7_structural_invariants():
    problems = []
    pairs = psi_curves = 0
    for D in (-1, -3):
        K = quad_field(D)
        ds = nonsquare_classes(K, 2)[:4]
        for E in sample_curves(D, 60):
            G = torsion_over_k(E)
            if G.n % G.m:
                problems.append(f"{E}: {G} not in normal form")
            for d in ds:
                GL, Gd = torsion_over_ext(E, d), torsion_of_twist(E, d)
                pairs += 1
                if _odd(GL.order) != _odd(G.order) * _odd(Gd.order):
                    problems.append(f"{E} d={d}: odd parts do not add")
                if (G.order * Gd.order) % GL.order:
                    problems.append(f"{E} d={d}: {GL} does not divide {G} x {Gd}")
                if GL.n % GL.m:
                    problems.append(f"{E} d={d}: {GL} not in normal form")
            for ext in (None, QuadExt(ds[0].rep)):
                chain = two_power_subgroup(E, ext)
                for P in chain.points():
                    if P.is_infinity:
                        continue
                    n = len(halve(E, P, ext)) if lifts_in(E, P, ext) else 0
                    if n not in (0, 4):
                        problems.append(f"{E}: {n} halves of {P}")
            chain = two_power_subgroup(E)
            depth = min(len(chain.levels) + 1, 3)
            ours = chain.x_levels() + [set()] * 3
            if division_levels(E, depth) != ours[:depth]:
                problems.append(f"{E}: division polynomials disagree with halving")
            psi_curves += 1
    ok = not problems and pairs >= 100 and psi_curves >= 50
    record_criterion(7, ok, f"{pairs} (E,d) pairs, {psi_curves} division-polynomial cross-checks, {len(problems)} failures")
    assert ok, problems[:10]


# -- 8: Diophantine searches and point lists -------------------------------------------


def _pts(D, *pairs):
    return {Point(parse_elem(x, D), parse_elem(y, D)) for x, y in pairs}


AUX_EXPECTED = {
    ("y^2=x^3+4x", -1): _pts(-1, ("0", "0"), ("2*w", "0"), ("-2*w", "0"), ("2", "4"), ("2", "-4"), ("-2", "4*w"), ("-2", "-4*w")),
    ("y^2=x^3+4x", -3): _pts(-3, ("0", "0"), ("2", "4"), ("2", "-4")),
    ("y^2=x^3+5x^2+4x", -3): _pts(-3, ("-4", "0"), ("-2", "2"), ("-2", "-2"), ("-1", "0"), ("0", "0"), ("2", "6"), ("2", "-6")),
    ("y^2=x^3-x", -3): _pts(-3, ("1", "0"), ("0", "0"), ("-1", "0")),
    ("y^2=x^3-x", -1): _pts(-1, ("0", "0"), ("1", "0"), ("-1", "0"), ("w", "1-w"), ("w", "-1+w"), ("-w", "1+w"), ("-w", "-1-w")),
    ("y^2=x^3+x", -1): _pts(-1, ("0", "0"), ("w", "0"), ("-w", "0")),
    ("y^2=x^3-4x", -1): _pts(-1, ("0", "0"), ("2", "0"), ("-2", "0")),
    # (1-w, -3+w) does not satisfy the equation; the points above 1-w are (1-w, +-(3+w))
    ("y^2=x^3-5x^2+4x", -3): _pts(-3, ("0", "0"), ("4", "0"), ("1", "0"), ("1-w", "-3-w"), ("1-w", "3+w"), ("1+w", "-3+w"), ("1+w", "3-w")),
    ("y^2+2xy+2y=x^3-x^2-2x", -1): _pts(-1, ("-1", "0"), ("0", "-2"), ("0", "0"), ("2", "-6"), ("2", "0")),
    ("y^2+2xy+2y=x^3-x^2-2x", -3): _pts(
        -3, ("-1", "0"), ("0", "-2"), ("0", "0"), ("2", "-6"), ("2", "0"),
        ("-1-w", "-3+w"), ("-1-w", "3+w"), ("-1+w", "-3-w"), ("-1+w", "3-w"),
        ("1/2-1/2*w", "-3/2+1/2*w"), ("1/2+1/2*w", "-3/2-1/2*w"),
    ),
}


def test_criterion_8_diophantine_certificates():
    start = time.perf_counter()
    results = {}
    for D in (-1, -3):
        results[f"fermat{D}"] = search_fermat(D, 15)
        results[f"s23{D}"] = search_s23(D, 8)
        results[f"s23m{D}"] = search_s23(D, 8, modified=True)
        results[f"s33{D}"] = search_s33(D, 4)
    nonempty = [k for k, r in results.items() if not r.empty]
    wrong_lists = []
    aux = {}
    for (name, D), want in AUX_EXPECTED.items():
        got = enumerate_aux_points(name, D, 20)
        aux[f"{name}@{D}"] = [str(P) for P in got]
        if set(got) != want or len(got) != len(want):
            wrong_lists.append(f"{name} over D={D}")
    elapsed = time.perf_counter() - start
    _digest("dioph", {k: r.certificate(timing=False) for k, r in results.items()})
    _digest("aux", aux)
    ok = not nonempty and not wrong_lists and elapsed < 300
    record_criterion(8, ok, f"{len(results)} searches empty: {not nonempty}; {len(AUX_EXPECTED)} point lists match: {not wrong_lists}; {elapsed:.0f}s")
    assert ok, nonempty + wrong_lists


# -- 9: determinism ------------------------------------------------------------


def _cli(*argv) -> str:
    buf = io.StringIO()
    with redirect_stdout(buf):
        main(list(argv))
    return buf.getvalue()


def test_criterion_9_determinism(scans):
    problems = []
    # library results recomputed and compared with what criteria 1-8 produced
    again = {
        "table3": _rows_summary(check_tables(["3"])),
        "table4": _rows_summary(check_tables(["4"])),
        "table56": _rows_summary(check_tables(["5", "6"])),
        "scan": {-1: run_scan(-1, 5, jobs=2), -3: scans[-3]},
    }
    for name, obj in again.items():
        before = _DIGESTS.get(name)
        if before is not None and before != hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest():
            problems.append(f"{name} changed on rerun")
    if len(_DIGESTS) < 7:
        problems.append(f"only {len(_DIGESTS)} criterion outputs recorded")
    # CLI output, repeated and with different worker counts
    commands = [
        ("tables", "--json"),
        ("analyze", "--D", "-3", "--M", "-1", "--N", "-1/2+1/2*w", "--json"),
        ("dioph", "--system", "fermat", "--D", "-3", "--bound", "10", "--json"),
        ("dioph", "--system", "aux:y^2=x^3-x", "--D", "-1", "--bound", "10", "--json"),
        ("scan", "--D", "-3", "--height", "3", "--json"),
    ]
    for cmd in commands:
        outs = {_cli(*cmd, "--jobs", "1"), _cli(*cmd, "--jobs", "1"), _cli(*cmd, "--jobs", "2")}
        if len(outs) != 1:
            problems.append(f"{cmd[0]} output varies")
    record_criterion(9, not problems, f"{len(_DIGESTS)} recorded outputs rechecked, {len(commands)} commands x 3 runs; {len(problems)} differences")
    assert not problems, problems
