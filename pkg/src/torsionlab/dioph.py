"""Exhaustive bounded-height searches for the Diophantine systems that rule out
torsion structures, and point lists on the auxiliary rank-0 curves.

A search only shows that no solution of small height exists. The claims it
corroborates rest on Mordell-Weil rank 0 facts that are not recomputed here;
every certificate says so in its metadata.
"""
from __future__ import annotations

import json
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd as _gcd
from math import isqrt as _isqrt
from typing import Callable, Iterable

from .curve import Point
from .numfield import (
    KElem,
    QuadField,
    _rationals_of_height,
    enumerate_k,
    enumerate_ok,
    quad_field,
    same_class,
)

DEFAULT_BOUNDS = {"fermat": 15, "s23": 8, "s23m": 8, "s33": 4, "aux": 20}

RANK_CAVEAT = (
    "bounded-height search only: absence of small solutions corroborates, "
    "but does not prove, the rank-0 statements it is derived from"
)

_EXCLUDED_RATIOS = (Fraction(-2), Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1))


@dataclass(frozen=True)
class SearchSpec:
    system: str
    D: int
    bound: int
    exclusions: tuple[str, ...] = ()

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("height bound must be at least 1")


@dataclass
class SearchResult:
    spec: SearchSpec
    solutions: list[tuple] = field(default_factory=list)
    scanned: int = 0
    wall_time: float = 0.0

    @property
    def empty(self) -> bool:
        return not self.solutions

    def certificate(self, timing: bool = True) -> dict:
        out = {
            "system": self.spec.system,
            "field": self.spec.D,
            "bound": self.spec.bound,
            "exclusions": list(self.spec.exclusions),
            "solutions": [[str(x) for x in sol] for sol in self.solutions],
            "scanned": self.scanned,
            "caveat": RANK_CAVEAT,
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    def write_certificate(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.certificate(), fh, indent=2)
            fh.write("\n")


def _positive_half(x: KElem) -> bool:
    """One representative of each pair {x, -x}."""
    cx, cy = x.ok_coords()
    return cx > 0 or (cx == 0 and cy > 0)


def _chunked_map(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# ---------------------------------------------------------------------------
# u^4 - v^4 = w^2


def _fermat_row(args: tuple[KElem, tuple[KElem, ...]]) -> tuple[list[tuple], int]:
    u, vs = args
    u4 = u ** 4
    found = []
    for v in vs:
        v4 = v ** 4
        if u4 == v4:
            continue
        w = (u4 - v4).sqrt()
        if w is not None:
            found.append((u, v, w))
    return found, len(vs)


def search_fermat(K: QuadField | int, H: int = DEFAULT_BOUNDS["fermat"], jobs: int = 1) -> SearchResult:
    """u^4 - v^4 = w^2 with u, v nonzero and u^4 != v^4 (so w != 0 as well).

    Only one of u, -u and one of v, -v is visited: the equation sees u^4, v^4."""
    K = quad_field(K) if isinstance(K, int) else K
    spec = SearchSpec("fermat", K.D, H, ("u=0", "v=0", "u^4=v^4"))
    start = time.perf_counter()
    half = tuple(x for x in enumerate_ok(K, H) if x and _positive_half(x))
    rows = _chunked_map(_fermat_row, [(u, half) for u in half], jobs)
    res = SearchResult(spec)
    for found, n in rows:
        res.solutions.extend(found)
        res.scanned += n
    res.wall_time = time.perf_counter() - start
    return res


# ---------------------------------------------------------------------------
# d s^2 = a^3(a+2b)c^2, d t^2 = b^3(b+2a)c^2


def _ratio_ok(a: KElem, b: KElem) -> bool:
    if b.is_zero():
        return False
    r = a / b
    return not (r.b == 0 and r.a in _EXCLUDED_RATIOS)


def _mn(a: KElem, b: KElem) -> tuple[KElem, KElem]:
    return a ** 3 * (a + 2 * b), b ** 3 * (b + 2 * a)


def _s23_row(args: tuple[KElem, tuple[KElem, ...], bool]) -> tuple[list[tuple], int]:
    a, bs, modified = args
    found, n = [], 0
    for b in bs:
        if not _ratio_ok(a, b):
            continue
        n += 1
        M, N = _mn(a, b)
        if modified:
            s, t = (-M).sqrt(), N.sqrt()
            if s is not None and t is not None and -M != N:
                found.append((a, b, s, t))
        else:
            # d s^2 = M, d t^2 = N solvable iff M N is a square; s^2 = t^2 iff M = N
            if M != N and (M * N).is_square():
                found.append((a, b, M, N))
    return found, n


def search_s23(K: QuadField | int, H: int = DEFAULT_BOUNDS["s23"], modified: bool = False, jobs: int = 1) -> SearchResult:
    """Pairs (a, b) making E(a^3(a+2b), b^3(b+2a)) a twist of a curve with a
    point of order 4 (modified: the -1 twist of one with (0,0) halving).

    The common factor c^2 only rescales s and t, so c = 1 covers every c."""
    K = quad_field(K) if isinstance(K, int) else K
    excl = ("b=0", "a/b in {-2,-1,-1/2,0,1}", "-M=N" if modified else "M=N")
    spec = SearchSpec("s23m" if modified else "s23", K.D, H, excl)
    start = time.perf_counter()
    elems = tuple(enumerate_ok(K, H))
    rows = _chunked_map(_s23_row, [(a, elems, modified) for a in elems], jobs)
    res = SearchResult(spec)
    for found, n in rows:
        res.solutions.extend(found)
        res.scanned += n
    res.wall_time = time.perf_counter() - start
    return res


def search_s33(K: QuadField | int, H: int = DEFAULT_BOUNDS["s33"]) -> SearchResult:
    """Two order-3 parametrizations (a, b), (a0, b0) with
    M0/M = N0/N in a non-square class.

    Equal ratios M/N are necessary, so pairs are grouped by that ratio and
    only compared within a group."""
    K = quad_field(K) if isinstance(K, int) else K
    spec = SearchSpec("s33", K.D, H, ("b=0", "a/b in {-2,-1,-1/2,0,1}", "d square"))
    start = time.perf_counter()
    groups: dict[KElem, list[tuple[KElem, KElem, KElem]]] = defaultdict(list)
    res = SearchResult(spec)
    elems = list(enumerate_ok(K, H))
    for a in elems:
        for b in elems:
            if not _ratio_ok(a, b):
                continue
            res.scanned += 1
            M, N = _mn(a, b)
            groups[M / N].append((a, b, M))
    for members in groups.values():
        for i, (a, b, M) in enumerate(members):
            for a0, b0, M0 in members[i + 1:]:
                if not same_class(M0, M):
                    res.solutions.append((a, b, a0, b0, M0 / M))
    res.wall_time = time.perf_counter() - start
    return res


# ---------------------------------------------------------------------------
# points on auxiliary curves


@dataclass(frozen=True)
class AuxCurve:
    """y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6 with rational coefficients."""

    name: str
    a1: int
    a3: int
    a2: int
    a4: int
    a6: int

    def ys(self, x: KElem) -> list[KElem]:
        # (2y + a1 x + a3)^2 = 4(x^3 + a2 x^2 + a4 x + a6) + (a1 x + a3)^2
        lin = self.a1 * x + self.a3
        disc = 4 * (x ** 3 + self.a2 * x * x + self.a4 * x + self.a6) + lin * lin
        r = disc.sqrt()
        if r is None:
            return []
        return sorted({(r - lin) / 2, (-r - lin) / 2}, key=lambda y: (y.a, y.b))

    def contains(self, P: Point) -> bool:
        x, y = P.x, P.y
        return y * y + self.a1 * x * y + self.a3 * y == x ** 3 + self.a2 * x * x + self.a4 * x + self.a6

    def neg(self, P: Point) -> Point:
        return Point(P.x, -P.y - self.a1 * P.x - self.a3)


AUX_CURVES = {
    "y^2=x^3-x": AuxCurve("y^2=x^3-x", 0, 0, 0, -1, 0),
    "y^2=x^3+x": AuxCurve("y^2=x^3+x", 0, 0, 0, 1, 0),
    "y^2=x^3+4x": AuxCurve("y^2=x^3+4x", 0, 0, 0, 4, 0),
    "y^2=x^3-4x": AuxCurve("y^2=x^3-4x", 0, 0, 0, -4, 0),
    "y^2=x^3+5x^2+4x": AuxCurve("y^2=x^3+5x^2+4x", 0, 0, 5, 4, 0),
    "y^2=x^3-5x^2+4x": AuxCurve("y^2=x^3-5x^2+4x", 0, 0, -5, 4, 0),
    "y^2+2xy+2y=x^3-x^2-2x": AuxCurve("y^2+2xy+2y=x^3-x^2-2x", 2, 2, -1, -2, 0),
}


def _aux_chunk(args: tuple[str, int, int, tuple[Fraction, ...]]) -> list[Point]:
    """Points with x = X + Y*omega for X in `xs_chunk`, Y over all rationals."""
    name, D, H, xs_chunk = args
    C = AUX_CURVES[name]
    rats = _rationals_of_height(H)
    K = quad_field(D)
    # (2y + a1 x + a3)^2 = 4x^3 + b1 x^2 + b2 x + b3
    b1 = 4 * C.a2 + C.a1 * C.a1
    b2 = 4 * C.a4 + 2 * C.a1 * C.a3
    b3 = 4 * C.a6 + C.a3 * C.a3
    half = D % 4 == 1
    out: list[Point] = []
    for X in xs_chunk:
        for Y in rats:
            # x = (p + q*sqrt(D)) / c with integers
            if half:
                re_, im = X + Y / 2, Y / 2
            else:
                re_, im = X, Y
            c = re_.denominator * im.denominator // _gcd(re_.denominator, im.denominator)
            p, q = int(re_ * c), int(im * c)
            # X^2, X^3 in Z[sqrt D]
            p2, q2 = p * p + D * q * q, 2 * p * q
            p3, q3 = p2 * p + D * q2 * q, p2 * q + q2 * p
            cc = c * c
            # c^4 * disc = c * (4 X^3 + b1 c X^2 + b2 c^2 X + b3 c^3)
            r = c * (4 * p3 + b1 * c * p2 + b2 * cc * p + b3 * cc * c)
            s = c * (4 * q3 + b1 * c * q2 + b2 * cc * q)
            n = r * r - D * s * s
            if n and _isqrt(n) ** 2 != n:
                continue
            x = K(re_, im)
            out.extend(Point(x, y) for y in C.ys(x))
    return out


def enumerate_aux_points(curve_id: str, K: QuadField | int, H: int = DEFAULT_BOUNDS["aux"], jobs: int = 1) -> list[Point]:
    """Affine K-points whose x-coordinate has height <= H, sorted."""
    if curve_id not in AUX_CURVES:
        raise KeyError(f"unknown auxiliary curve {curve_id!r}; known: {sorted(AUX_CURVES)}")
    K = quad_field(K) if isinstance(K, int) else K
    rats = _rationals_of_height(H)
    step = max(1, len(rats) // 16)
    chunks = [(curve_id, K.D, H, tuple(rats[i:i + step])) for i in range(0, len(rats), step)]
    pts = [P for part in _chunked_map(_aux_chunk, chunks, jobs) for P in part]
    return sorted(set(pts), key=point_key)


def point_key(P: Point) -> tuple:
    return (P.x.a, P.x.b, P.y.a, P.y.b)


def aux_search(curve_id: str, K: QuadField | int, H: int = DEFAULT_BOUNDS["aux"], jobs: int = 1) -> SearchResult:
    K = quad_field(K) if isinstance(K, int) else K
    start = time.perf_counter()
    pts = enumerate_aux_points(curve_id, K, H, jobs)
    res = SearchResult(SearchSpec(f"aux:{curve_id}", K.D, H), [(P.x, P.y) for P in pts])
    res.scanned = sum(1 for _ in enumerate_k(K, H))
    res.wall_time = time.perf_counter() - start
    return res


def run_search(system: str, D: int, bound: int | None = None, jobs: int = 1) -> SearchResult:
    if system == "fermat":
        return search_fermat(D, bound or DEFAULT_BOUNDS["fermat"], jobs)
    if system in ("s23", "s23m"):
        return search_s23(D, bound or DEFAULT_BOUNDS["s23"], system == "s23m", jobs)
    if system == "s33":
        return search_s33(D, bound or DEFAULT_BOUNDS["s33"])
    if system.startswith("aux:"):
        return aux_search(system[4:], D, bound or DEFAULT_BOUNDS["aux"], jobs)
    raise KeyError(f"unknown system {system!r}")


def systems() -> Iterable[str]:
    return ["fermat", "s23", "s23m", "s33"] + [f"aux:{k}" for k in AUX_CURVES]
