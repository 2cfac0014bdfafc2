"""Curves E(M,N): y^2 = x(x+M)(x+N), their group law, twists, and the
square-root recognizers/constructors for points of order 4, 8 and 3."""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterator

from .numfield import (
    KElem,
    QuadField,
    SquareClass,
    enumerate_ok,
    ok_gcd,
    ok_factor,
    quad_field,
)


class SingularCurve(ValueError):
    pass


class CurveMismatch(ValueError):
    pass


class NoParametrization(ValueError):
    pass


class EmptyGeneration(ValueError):
    pass


@dataclass(frozen=True)
class Point:
    """An affine point (x, y), or the point at infinity when x is None."""

    x: object = None
    y: object = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __str__(self):
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"


INFINITY = Point()


@dataclass(frozen=True)
class Curve:
    D: int
    M: KElem
    N: KElem

    def __post_init__(self):
        if self.M.D != self.D or self.N.D != self.D:
            raise CurveMismatch("coefficients must lie in the curve's field")
        if self.M.is_zero() or self.N.is_zero() or self.M == self.N:
            raise SingularCurve(f"E({self.M},{self.N}) is singular")

    @property
    def field(self) -> QuadField:
        return quad_field(self.D)

    @property
    def A(self) -> KElem:
        return self.M + self.N

    @property
    def B(self) -> KElem:
        return self.M * self.N

    def rhs(self, x):
        return x * (x + self.M) * (x + self.N)

    def contains(self, P: Point) -> bool:
        if P.is_infinity:
            return True
        return P.y * P.y == self.rhs(P.x)

    def two_torsion(self) -> list[Point]:
        K = self.field
        return [Point(K.zero, K.zero), Point(-self.M, K.zero), Point(-self.N, K.zero)]

    # -- group law on y^2 = x^3 + A x^2 + B x ----------------------------
    def neg(self, P: Point) -> Point:
        if P.is_infinity:
            return P
        return Point(P.x, -P.y)

    def add(self, P: Point, Q: Point) -> Point:
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        if P.x == Q.x:
            if P.y == -Q.y:
                return INFINITY
            return self.double(P)
        slope = (Q.y - P.y) / (Q.x - P.x)
        x3 = slope * slope - self.A - P.x - Q.x
        y3 = -(P.y + slope * (x3 - P.x))
        return Point(x3, y3)

    def double(self, P: Point) -> Point:
        if P.is_infinity or not P.y:
            return INFINITY
        slope = (3 * P.x * P.x + 2 * self.A * P.x + self.B) / (2 * P.y)
        x3 = slope * slope - self.A - 2 * P.x
        y3 = -(P.y + slope * (x3 - P.x))
        return Point(x3, y3)

    def mul(self, n: int, P: Point) -> Point:
        if n < 0:
            return self.mul(-n, self.neg(P))
        result = INFINITY
        addend = P
        while n:
            if n & 1:
                result = self.add(result, addend)
            addend = self.double(addend)
            n >>= 1
        return result

    def order(self, P: Point, bound: int = 64) -> int | None:
        Q = P
        for k in range(1, bound + 1):
            if Q.is_infinity:
                return k
            Q = self.add(Q, P)
        return None

    # -- models -----------------------------------------------------------
    def twist(self, d) -> Curve:
        """E(dM, dN), the K-model of the quadratic twist by d."""
        if isinstance(d, SquareClass):
            d = d.rep
        return Curve(self.D, d * self.M, d * self.N)

    def translates(self) -> list[Curve]:
        """The models obtained by moving each 2-torsion root to x = 0."""
        M, N = self.M, self.N
        return [self, Curve(self.D, -M, N - M), Curve(self.D, -N, M - N)]

    def __str__(self):
        return f"E({self.M},{self.N})@{self.D}"


def new_curve(K: QuadField | int, M, N) -> Curve:
    if isinstance(K, int):
        K = quad_field(K)
    return Curve(K.D, K.coerce(M), K.coerce(N))


_CURVE_TEXT = re.compile(r"^\s*E\((.*)\)\s*@\s*(-?\d+)\s*$")


def parse_curve(text: str) -> Curve:
    """Parse ``E(M,N)@D``."""
    m = _CURVE_TEXT.match(text)
    if not m:
        raise ValueError(f"not a curve: {text!r}")
    body, D = m.group(1), int(m.group(2))
    depth = 0
    for pos, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return new_curve(D, body[:pos], body[pos + 1:])
    raise ValueError(f"missing comma in {text!r}")


def from_roots(K: QuadField, alpha, beta, gamma) -> Curve:
    """E(M,N) model of y^2 = (x-alpha)(x-beta)(x-gamma), integral after scaling."""
    alpha, beta, gamma = K.coerce(alpha), K.coerce(beta), K.coerce(gamma)
    M, N = alpha - beta, alpha - gamma
    c = _denominator(M) * _denominator(N)
    return Curve(K.D, M * (c * c), N * (c * c))


def _denominator(x: KElem) -> int:
    return x.triple[2]


# ---------------------------------------------------------------------------
# recognizers


@dataclass(frozen=True)
class Order4Witness:
    case: int  # 0: (0,0) lifts; 1: (-M,0) lifts; 2: (-N,0) lifts
    roots: tuple[KElem, KElem]


def ono_order4(E: Curve) -> Order4Witness | None:
    """Which 2-torsion point halves over K, with the square roots that show it."""
    M, N = E.M, E.N
    for case, (p, q) in enumerate(((M, N), (-M, N - M), (-N, M - N))):
        s, t = p.sqrt(), q.sqrt()
        if s is not None and t is not None:
            return Order4Witness(case, (s, t))
    return None


@dataclass(frozen=True)
class PythTriple:
    u: KElem
    v: KElem
    w: KElem

    def __post_init__(self):
        if self.u * self.u + self.v * self.v != self.w * self.w:
            raise ValueError(f"({self.u},{self.v},{self.w}) is not Pythagorean")


@dataclass(frozen=True)
class Order8Witness:
    case: int
    d: KElem
    triple: PythTriple


def _strip_common_factor(d: KElem, t: PythTriple) -> tuple[KElem, PythTriple]:
    parts = [x for x in (t.u, t.v, t.w) if x]
    if not all(x.is_integral() for x in parts):
        return d, t
    g = parts[0]
    for x in parts[1:]:
        g = ok_gcd(g, x)
    return d * g * g, PythTriple(t.u / g, t.v / g, t.w / g)


def ono_order8(E: Curve) -> Order8Witness | None:
    """Recover (d, (u, v, w)) with M' = d^2 u^4, N' = d^2 v^4, u^2 + v^2 = w^2 on
    the translated model whose (0,0) is four times a K-point of order 8."""
    for case, model in enumerate(E.translates()):
        a0, b = model.M.sqrt(), model.N.sqrt()
        if a0 is None or b is None:
            continue
        for a in (a0, -a0):
            ab = a * b
            u = ab.sqrt()
            w = (ab + b * b).sqrt()
            if u is None or w is None or (ab + a * a).sqrt() is None:
                continue
            d = b.inverse()
            d, triple = _strip_common_factor(d, PythTriple(u, b, w))
            if d * d * triple.u ** 4 != model.M or d * d * triple.v ** 4 != model.N:
                raise ArithmeticError("order-8 witness failed to reproduce the model")
            return Order8Witness(case, d, triple)
    return None


@dataclass(frozen=True)
class Order3Param:
    a: KElem
    b: KElem
    c: KElem

    def M(self) -> KElem:
        return self.a ** 3 * (self.a + 2 * self.b) * self.c * self.c

    def N(self) -> KElem:
        return self.b ** 3 * (self.b + 2 * self.a) * self.c * self.c


_EXCLUDED_RATIOS = {-2, -1, 0, 1}


def ono_order3_param(E: Curve, P: Point) -> Order3Param:
    """(a, b, c) in O_K with M = a^3(a+2b)c^2 and N = b^3(b+2a)c^2, from a point
    of order 3 via (1+t)^2 = M/x + 1."""
    if P.is_infinity or not E.contains(P) or E.order(P, 3) != 3:
        raise ValueError("P must be a point of order 3 on E")
    x, y = P.x, P.y
    s = (E.M / x + 1).sqrt()
    if s is None:
        raise NoParametrization("M/x + 1 is not a square")
    for root in (s, -s):
        t = root - 1
        if not t or not (1 + t) or not (1 + t.inverse()):
            continue
        c = y / (x * (1 + t) * (1 + t.inverse()))
        # t = a/b with a, b coprime in O_K
        den = t.triple[2]
        a, b = t * den, E.field(den)
        g = ok_gcd(a, b)
        a, b = a / g, b / g
        if a / b in _EXCLUDED_RATIOS or a / b == KElem(E.D, -1, 0) / 2:
            continue
        dd = c / (t * b * b)
        if not dd.is_integral():
            continue
        par = Order3Param(a, b, dd)
        if par.M() == E.M and par.N() == E.N:
            return par
    raise NoParametrization(f"no O_K parametrization found for {E}")


# ---------------------------------------------------------------------------
# constructors


def gen_pyth(m: KElem) -> PythTriple:
    """(1 - m^2, 2m, 1 + m^2) scaled into O_K."""
    c = m.triple[2]
    u, v, w = 1 - m * m, 2 * m, 1 + m * m
    if not u or not v or not w:
        raise ValueError(f"m={m} gives a degenerate triple")
    s = c * c
    return PythTriple(u * s, v * s, w * s)


def _shape_key(shape) -> tuple[int, int]:
    if isinstance(shape, str):
        m, n = shape.lower().split("x")
        return int(m), int(n)
    return tuple(shape) if not hasattr(shape, "m") else (shape.m, shape.n)


def _candidate_stream(K: QuadField, shape: tuple[int, int], H: int) -> Iterator[tuple[KElem, KElem]]:
    elems = [x for x in enumerate_ok(K, H) if x]
    if shape == (2, 2):
        rng = random.Random(20170101 + K.D)
        total = len(elems) ** 2
        for _ in range(min(total, 40 * len(elems) + 200)):
            yield rng.choice(elems), rng.choice(elems)
    elif shape == (2, 4):
        for s in elems:
            for t in elems:
                yield s * s, t * t
    elif shape == (2, 8):
        for m in elems:
            try:
                tr = gen_pyth(m)
            except ValueError:
                continue
            yield tr.u ** 4, tr.v ** 4
    elif shape == (2, 6):
        for a in elems:
            for b in elems:
                yield a ** 3 * (a + 2 * b), b ** 3 * (b + 2 * a)
    elif shape == (4, 4):
        for m in elems:
            try:
                tr = gen_pyth(m)
            except ValueError:
                continue
            yield tr.v * tr.v, tr.w * tr.w


def gen_curves(shape, K: QuadField | int, H: int, count: int | None = None) -> list[Curve]:
    """Curves over K with torsion exactly `shape`, from parameters of height <= H."""
    from .torsion import catalog, torsion_over_k  # local import: torsion depends on curve

    if isinstance(K, int):
        K = quad_field(K)
    key = _shape_key(shape)
    if K.theorem_field and key not in catalog(K.D):
        raise EmptyGeneration(f"{key[0]}x{key[1]} does not occur over D={K.D}")
    seen: set[tuple[KElem, KElem]] = set()
    out: list[Curve] = []
    for M, N in _candidate_stream(K, key, H):
        if not M or not N or M == N or (M, N) in seen:
            continue
        seen.add((M, N))
        E = Curve(K.D, M, N)
        sh = torsion_over_k(E)
        if (sh.m, sh.n) == key:
            out.append(E)
            if count is not None and len(out) >= count:
                break
    if not out:
        raise EmptyGeneration(f"no {key[0]}x{key[1]} curve over D={K.D} with parameters of height <= {H}")
    return out


def square_part_reduced(E: Curve) -> Curve:
    """E(M/s^2, N/s^2) for the largest square s^2 dividing both M and N in O_K."""
    if not (E.M.is_integral() and E.N.is_integral()):
        return E
    g = ok_gcd(E.M, E.N)
    _, factors = ok_factor(g)
    s = E.field.one
    for p, e in factors:
        s = s * p ** (e // 2)
    return Curve(E.D, E.M / (s * s), E.N / (s * s))


def _elem_key(x: KElem) -> tuple:
    cx, cy = x.ok_coords()
    return (x.norm(), cx, cy)


def isomorphism_key(E: Curve) -> tuple:
    """A K-isomorphism invariant of E(M,N)."""
    C = canonical_model(E)
    return (_elem_key(C.M), _elem_key(C.N))


def canonical_model(E: Curve) -> Curve:
    """Minimum over the six models that put a 2-torsion point at 0, each
    reduced by squares dividing both coefficients and by unit squares."""
    K = E.field
    unit_squares = {u * u for u in K.units()}
    best = None
    M, N = E.M, E.N
    for p, q in ((M, N), (N, M), (-M, N - M), (N - M, -M), (-N, M - N), (M - N, -N)):
        red = square_part_reduced(Curve(E.D, p, q))
        for u in unit_squares:
            key = (_elem_key(u * red.M), _elem_key(u * red.N))
            if best is None or key < best[0]:
                best = (key, Curve(E.D, u * red.M, u * red.N))
    return best[1]
