"""Quadratic extensions in which torsion grows, twist shapes, and conformance
checks against the classification data shipped in ``data/tables.json``."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable, Iterable

from .curve import Curve, new_curve, ono_order4
from .numfield import (
    KElem,
    SquareClass,
    nonsquare_classes,
    parse_elem,
    quad_field,
    same_class,
    square_class,
)
from .torsion import (
    TorsionShape,
    odd_roots,
    torsion_of_twist,
    torsion_over_ext,
    torsion_over_k,
    two_power_subgroup,
)

DEFAULT_EXTRA_HEIGHT = 2


class ConformanceViolation(AssertionError):
    pass


# ---------------------------------------------------------------------------
# reference data


@lru_cache(maxsize=None)
def load_tables() -> dict:
    text = resources.files("torsionlab").joinpath("data/tables.json").read_text()
    return json.loads(text)


def _shape(text: str) -> TorsionShape:
    return TorsionShape.parse(text)


@dataclass(frozen=True)
class ShapeRules:
    growth: frozenset[TorsionShape]
    g: frozenset[int]
    twists: frozenset[TorsionShape]


def shape_rules(D: int, G: TorsionShape) -> ShapeRules | None:
    """Attainable growth shapes, growth counts and twist shapes for base shape G."""
    entry = load_tables()["summary"].get(str(D), {}).get(str(G))
    if entry is None:
        return None
    return ShapeRules(
        frozenset(_shape(s) for s in entry["growth"]),
        frozenset(entry["g"]),
        frozenset(_shape(s) for s in entry["twists"]),
    )


# ---------------------------------------------------------------------------
# records


def class_key(cls: SquareClass) -> tuple:
    x, y = cls.rep.ok_coords()
    return (cls.rep.norm(), x, y)


@dataclass(frozen=True)
class GrowthRecord:
    d: SquareClass
    shape: TorsionShape

    def to_dict(self) -> dict:
        out = {"d": str(self.d.rep), "shape": [self.shape.m, self.shape.n]}
        if self.shape.alternate():
            out["also_written"] = self.shape.alternate()
        return out


@dataclass
class AnalysisReport:
    curve: Curve
    shape_K: TorsionShape
    growth: list[GrowthRecord]
    twists: list[GrowthRecord] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)
    outside_candidates: list[GrowthRecord] = field(default_factory=list)

    @property
    def g(self) -> int:
        return len(self.growth)

    def to_dict(self) -> dict:
        E = self.curve
        out = {
            "field": E.D,
            "M": str(E.M),
            "N": str(E.N),
            "shape_K": [self.shape_K.m, self.shape_K.n],
            "growth": [r.to_dict() for r in self.growth],
            "g": self.g,
            "twists": [r.to_dict() for r in self.twists],
        }
        if self.violations:
            out["violations"] = list(self.violations)
        if self.outside_candidates:
            out["outside_candidates"] = [r.to_dict() for r in self.outside_candidates]
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def render(self) -> str:
        """One row: shape over K | (M,N) | g | (d, shape over L) ..."""
        E = self.curve
        growth = ", ".join(f"({r.d}, {_show(r.shape)})" for r in self.growth) or "-"
        lines = [f"{_show(self.shape_K):<10} | ({E.M},{E.N}) | {self.g} | {growth}"]
        if self.twists:
            tw = ", ".join(f"({r.d}, {_show(r.shape)})" for r in self.twists)
            lines.append(f"{'twists':<10} | {tw}")
        for v in self.violations:
            lines.append(f"VIOLATION: {v}")
        return "\n".join(lines)


def _show(shape: TorsionShape) -> str:
    alt = shape.alternate()
    return f"{shape.presentation()}" + (f" (= {alt})" if alt else "")


# ---------------------------------------------------------------------------
# candidates


def _dedupe(classes: Iterable[SquareClass]) -> list[SquareClass]:
    out: list[SquareClass] = []
    for c in classes:
        if c.is_identity():
            continue
        if not any(same_class(c.rep, o.rep) for o in out):
            out.append(c)
    return sorted(out, key=class_key)


def candidate_extensions(E: Curve) -> list[SquareClass]:
    """Every class d for which E(K(sqrt d)) can be larger than E(K).

    A 2-power point of E(K) halves over K(sqrt d) exactly when its
    non-square lift quantities all lie in the class of d; odd points appear
    over K(sqrt d) exactly when they appear on the twist by d."""
    found: list[SquareClass] = []
    for P in two_power_subgroup(E).points():
        nonsq = [q for q in (P.x, P.x + E.M, P.x + E.N) if q and not q.is_square()]
        if not nonsq:
            continue
        first = nonsq[0]
        if all(same_class(first, q) for q in nonsq[1:]):
            found.append(square_class(first))
    for _n, _x0, rhs in odd_roots(E):
        if rhs and not rhs.is_square():
            found.append(square_class(rhs))
    return _dedupe(found)


# ---------------------------------------------------------------------------
# analysis


def twist_shapes(E: Curve, ds: Iterable[SquareClass], strict: bool = True) -> list[GrowthRecord]:
    G = torsion_over_k(E)
    out = [GrowthRecord(d, torsion_of_twist(E, d)) for d in ds]
    problems = _twist_violations(E, G, out)
    if problems and strict:
        raise ConformanceViolation("; ".join(problems))
    return out


def _twist_violations(E: Curve, G: TorsionShape, twists: list[GrowthRecord]) -> list[str]:
    rules = shape_rules(E.D, G) if E.field.theorem_field else None
    if rules is None:
        return []
    return [
        f"{E}: twist by {r.d} has {r.shape}, not among {sorted(map(str, rules.twists))}"
        for r in twists
        if r.shape not in rules.twists
    ]


def full4_extension(E: Curve) -> SquareClass | None:
    """The class d with C4+C4 inside E(K(sqrt d)), for E(K) of shape C2+C4."""
    G = torsion_over_k(E)
    if (G.m, G.n) != (2, 4):
        raise ValueError(f"{E} has shape {G}; expected C2+C4")
    witness = ono_order4(E)
    s, t = witness.roots
    diff = s * s - t * t
    K = E.field
    minus_one = -K.one
    if minus_one.is_square():
        return square_class(diff)
    if diff.is_square() or (-diff).is_square():
        return square_class(minus_one)
    return None


def _growth_violations(E: Curve, G: TorsionShape, growth: list[GrowthRecord]) -> list[str]:
    if not E.field.theorem_field:
        return []
    problems = []
    if len(growth) > 3:
        problems.append(f"{E}: grows in {len(growth)} > 3 extensions")
    rules = shape_rules(E.D, G)
    if rules is None:
        return problems + [f"{E}: base shape {G} has no classification entry"]
    if len(growth) not in rules.g:
        problems.append(f"{E}: g={len(growth)} not in {sorted(rules.g)} for {G}")
    for r in growth:
        if r.shape not in rules.growth:
            problems.append(f"{E}: growth to {r.shape} over K(sqrt {r.d}) not allowed for {G}")
    full = [r for r in growth if r.shape.m % 4 == 0 and G.m == 2]
    if len(full) > 1:
        problems.append(f"{E}: C4+C4 appears over {len(full)} extensions")
    if (G.m, G.n) == (2, 4):
        d = full4_extension(E)
        if d is None and full:
            problems.append(f"{E}: C4+C4 over K(sqrt {full[0].d}) but no full-4 class predicted")
        if d is not None and (not full or not same_class(d.rep, full[0].d.rep)):
            problems.append(f"{E}: predicted C4+C4 over K(sqrt {d}) not observed")
    return problems


def analyze(
    E: Curve,
    strict: bool = True,
    extra_height: int = DEFAULT_EXTRA_HEIGHT,
    with_twists: bool = True,
    mapper: Callable = map,
) -> AnalysisReport:
    """Shape over K, every growth extension, and twist shapes for the candidates.

    `mapper` lets callers evaluate the per-extension torsion computations in
    parallel; results are merged in a fixed order either way."""
    G = torsion_over_k(E)
    cands = candidate_extensions(E)
    shapes = list(mapper(_ext_shape, [(E, d) for d in cands]))
    growth = [GrowthRecord(d, s) for d, s in zip(cands, shapes) if s.order > G.order]
    outside: list[GrowthRecord] = []
    if not E.field.theorem_field and extra_height > 0:
        extra = [c for c in nonsquare_classes(E.field, extra_height) if not any(same_class(c.rep, d.rep) for d in cands)]
        extra = _dedupe(extra)
        for d, s in zip(extra, mapper(_ext_shape, [(E, d) for d in extra])):
            if s.order > G.order:
                outside.append(GrowthRecord(d, s))
        growth = sorted(growth + outside, key=lambda r: class_key(r.d))
    twists = [GrowthRecord(d, torsion_of_twist(E, d)) for d in cands] if with_twists else []
    violations = _growth_violations(E, G, growth) + _twist_violations(E, G, twists)
    if violations and strict:
        raise ConformanceViolation("; ".join(violations))
    return AnalysisReport(E, G, growth, twists, violations, outside)


def _ext_shape(args: tuple[Curve, SquareClass]) -> TorsionShape:
    E, d = args
    return torsion_over_ext(E, d)


# ---------------------------------------------------------------------------
# reference examples


@dataclass(frozen=True)
class RowCheck:
    table: str
    label: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"table {self.table} {self.label}: {'PASS' if self.passed else 'FAIL'}{'' if self.passed else ' ' + self.detail}"


def _row_curve(D: int, row: dict) -> Curve:
    return new_curve(D, parse_elem(row["M"], D), parse_elem(row["N"], D))


def _label(row: dict) -> str:
    M, N = row.get("printed", (row["M"], row["N"]))
    return f"({M},{N})"


def _check_growth_row(table: str, D: int, row: dict) -> RowCheck:
    E = _row_curve(D, row)
    rep = analyze(E, strict=False)
    problems = list(rep.violations)
    want_shape = _shape(row["shape"])
    if rep.shape_K != want_shape:
        problems.append(f"shape {rep.shape_K} != {want_shape}")
    if rep.g != row["g"]:
        problems.append(f"g {rep.g} != {row['g']}")
    expected = [(parse_elem(d, D), _shape(s)) for d, s in row["growth"]]
    unmatched = list(rep.growth)
    for d, s in expected:
        hit = next((r for r in unmatched if same_class(d, r.d.rep) and r.shape == s), None)
        if hit is None:
            problems.append(f"missing ({d}, {s})")
        else:
            unmatched.remove(hit)
    for r in unmatched:
        problems.append(f"unexpected ({r.d}, {r.shape})")
    return RowCheck(table, _label(row), not problems, "; ".join(problems))


def _check_ext_row(table: str, D: int, row: dict) -> RowCheck:
    E = _row_curve(D, row)
    d = parse_elem(row["d"], D)
    problems = []
    G, want_G = torsion_over_k(E), _shape(row["shape"])
    if G != want_G:
        problems.append(f"shape {G} != {want_G}")
    L_shape, want_L = torsion_over_ext(E, d), _shape(row["shape_L"])
    if L_shape != want_L:
        problems.append(f"shape over K(sqrt {d}) {L_shape} != {want_L}")
    rep = analyze(E, strict=False)
    if not any(same_class(d, r.d.rep) and r.shape == want_L for r in rep.growth):
        problems.append(f"({d}, {want_L}) absent from the growth list")
    return RowCheck(table, f"{_label(row)} d={row['d']}", not problems, "; ".join(problems))


def check_tables(tables: Iterable[str] | None = None) -> list[RowCheck]:
    data = load_tables()
    wanted = {str(t) for t in tables} if tables is not None else None
    out: list[RowCheck] = []
    for tid, tab in data["growth_tables"].items():
        if wanted is None or tid in wanted:
            out.extend(_check_growth_row(tid, tab["D"], row) for row in tab["rows"])
    for tid, tab in data["extension_tables"].items():
        if wanted is None or tid in wanted:
            out.extend(_check_ext_row(tid, tab["D"], row) for row in tab["rows"])
    return out


def table_ids() -> list[str]:
    data = load_tables()
    return sorted(list(data["growth_tables"]) + list(data["extension_tables"]))


def field_of(D: int):
    return quad_field(D)


__all__ = [
    "AnalysisReport",
    "ConformanceViolation",
    "GrowthRecord",
    "KElem",
    "RowCheck",
    "analyze",
    "candidate_extensions",
    "check_tables",
    "full4_extension",
    "load_tables",
    "shape_rules",
    "table_ids",
    "twist_shapes",
]
