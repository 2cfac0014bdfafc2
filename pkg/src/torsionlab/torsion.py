"""Torsion subgroups over K and over quadratic extensions L = K(sqrt(d)).

The 2-primary part comes from repeated halving of the 2-torsion points; a
point (x0, y0) halves over F exactly when x0, x0+M, x0+N are squares in F.
The odd part (only 3 and 5 can occur with full 2-torsion over a quadratic
field) comes from K-rational roots of the 3- and 5-division polynomials.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

import numpy as np
from sympy import primerange
from sympy.ntheory import sqrt_mod
from sympy.polys.domains import ZZ
from sympy.polys.factortools import dup_factor_list

from .curve import INFINITY, Curve, Point
from .numfield import KElem, LElem, QuadExt, SquareClass, quad_field, square_class

FieldOrExt = Union[None, QuadExt, SquareClass, KElem]

DEFAULT_MAX_CHAIN = 32


class NoLift(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


class CatalogViolation(AssertionError):
    pass


# ---------------------------------------------------------------------------
# shapes


@dataclass(frozen=True, order=True)
class TorsionShape:
    """C_m + C_n with m | n."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n % self.m:
            raise ValueError(f"({self.m},{self.n}) is not in m|n normal form")

    @property
    def order(self) -> int:
        return self.m * self.n

    def contains(self, other: TorsionShape) -> bool:
        """Whether C_m' + C_n' embeds in this group."""
        return self.m % other.m == 0 and self.n % other.n == 0

    @classmethod
    def from_parts(cls, a: int, b: int, r3: int = 0, r5: int = 0) -> TorsionShape:
        """Normal form from 2-exponents a <= b and the 3-, 5-ranks."""
        a, b = min(a, b), max(a, b)
        m = 2 ** a * (3 if r3 >= 2 else 1) * (5 if r5 >= 2 else 1)
        n = 2 ** b * (3 if r3 >= 1 else 1) * (5 if r5 >= 1 else 1)
        return cls(m, n)

    @classmethod
    def parse(cls, text: str) -> TorsionShape:
        m, n = text.lower().replace("c", "").replace("+", "x").split("x")
        m, n = int(m), int(n)
        g = math.gcd(m, n)
        return cls(g, m * n // g)

    def presentation(self) -> str:
        return f"C{self.m}+C{self.n}"

    def alternate(self) -> str | None:
        """The other common way of writing this group, if there is one."""
        if (self.m, self.n) == (2, 12):
            return "C4+C6"
        return None

    def __str__(self):
        return f"{self.m}x{self.n}"


# Najman's list restricted to groups containing C2 + C2
_CATALOG = {
    -1: {(2, 2), (2, 4), (2, 6), (2, 8), (4, 4)},
    -3: {(2, 2), (2, 4), (2, 6), (2, 8)},
}
# Kamienny's list for quadratic fields, full 2-torsion part
_GENERIC_CATALOG = {(2, 2), (2, 4), (2, 6), (2, 8), (2, 10), (2, 12)}


def catalog(D: int) -> set[tuple[int, int]]:
    return set(_CATALOG.get(D, _GENERIC_CATALOG))


# ---------------------------------------------------------------------------
# polynomials over K


@dataclass(frozen=True)
class KPoly:
    """Dense polynomial over K; coeffs[i] multiplies x^i."""

    D: int
    coeffs: tuple[KElem, ...]

    @classmethod
    def make(cls, D: int, coeffs: Iterable) -> KPoly:
        K = quad_field(D)
        cs = [K.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        return cls(D, tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: KPoly) -> KPoly:
        n = max(len(self.coeffs), len(other.coeffs))
        zero = quad_field(self.D).zero
        a = self.coeffs + (zero,) * (n - len(self.coeffs))
        b = other.coeffs + (zero,) * (n - len(other.coeffs))
        return KPoly.make(self.D, (x + y for x, y in zip(a, b)))

    def __neg__(self) -> KPoly:
        return KPoly(self.D, tuple(-c for c in self.coeffs))

    def __sub__(self, other: KPoly) -> KPoly:
        return self + (-other)

    def __mul__(self, other) -> KPoly:
        if not isinstance(other, KPoly):
            return KPoly.make(self.D, (c * other for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return KPoly(self.D, ())
        zero = quad_field(self.D).zero
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return KPoly.make(self.D, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> KPoly:
        result = KPoly.make(self.D, [1])
        for _ in range(e):
            result = result * self
        return result

    def divmod(self, other: KPoly) -> tuple[KPoly, KPoly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        zero = quad_field(self.D).zero
        q = [zero] * max(0, len(rem) - len(other.coeffs) + 1)
        lead_inv = other.coeffs[-1].inverse()
        for i in range(len(q) - 1, -1, -1):
            c = rem[i + other.degree] * lead_inv
            q[i] = c
            if c.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                rem[i + j] = rem[i + j] - c * b
        return KPoly.make(self.D, q), KPoly.make(self.D, rem)

    def __str__(self):
        terms = [f"({c})*x^{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(reversed(terms)) or "0"


def _x(D: int) -> KPoly:
    return KPoly.make(D, [0, 1])


def psi3(E: Curve) -> KPoly:
    """3x^4 + 4(M+N)x^3 + 6MNx^2 - M^2N^2."""
    A, B = E.A, E.B
    return KPoly.make(E.D, [-(B * B), 0, 6 * B, 4 * A, 3])


@lru_cache(maxsize=4096)
def _division_factors(E: Curve, n: int) -> KPoly:
    """f_n with psi_n = f_n (n odd) or psi_n = 2y f_n (n even)."""
    D, A, B = E.D, E.A, E.B
    if n == 0:
        return KPoly(D, ())
    if n in (1, 2):
        return KPoly.make(D, [1])
    if n == 3:
        return psi3(E)
    if n == 4:
        return KPoly.make(D, [-2 * B ** 3, -4 * A * B * B, -10 * B * B, 0, 10 * B, 4 * A, 2])
    f = lambda k: _division_factors(E, k)  # noqa: E731
    F2 = _two_y_squared(E) ** 2
    m = n // 2
    if n % 2:
        if m % 2 == 0:
            return F2 * f(m + 2) * f(m) ** 3 - f(m - 1) * f(m + 1) ** 3
        return f(m + 2) * f(m) ** 3 - F2 * f(m - 1) * f(m + 1) ** 3
    return f(m) * (f(m + 2) * f(m - 1) ** 2 - f(m - 2) * f(m + 1) ** 2)


def _two_y_squared(E: Curve) -> KPoly:
    """(2y)^2 = 4x^3 + 4Ax^2 + 4Bx."""
    return KPoly.make(E.D, [0, 4 * E.B, 4 * E.A, 4])


def psi_n(E: Curve, n: int) -> KPoly:
    """The n-division polynomial in x alone: f_n for odd n, (2y)^2 f_n for even n.

    For even n the true psi_n carries one factor 2y; squaring it away keeps the
    polynomial in K[x] while leaving the root set unchanged."""
    if not 1 <= n <= 10:
        raise ValueError("n must lie in 1..10")
    if n % 2:
        return _division_factors(E, n)
    return _two_y_squared(E) * _division_factors(E, n)


# ---------------------------------------------------------------------------
# roots in K


def _integral_parts(f: KPoly) -> tuple[list[int], list[int]]:
    """Integer P, Q with c*f = P + Q*sqrt(D) for some positive integer c."""
    L = 1
    for c in f.coeffs:
        L = L * c.triple[2] // math.gcd(L, c.triple[2])
    P, Q = [], []
    for c in f.coeffs:
        a, b, den = c.triple
        P.append(a * (L // den))
        Q.append(b * (L // den))
    return P, Q


@lru_cache(maxsize=None)
def _split_primes(D: int, count: int = 12) -> tuple[tuple[int, int], ...]:
    out = []
    for p in primerange(61, 10_000):
        s = sqrt_mod(D % p, p)
        if s is not None and s != 0:
            out.append((p, int(s)))
            if len(out) == count:
                break
    return tuple(out)


def _no_root_mod(P: list[int], Q: list[int], D: int) -> bool:
    """True if some split prime proves f has no root in K."""
    for p, s in _split_primes(D):
        xs = np.arange(p, dtype=np.int64)
        for root in (s, p - s):
            cs = [(a + b * root) % p for a, b in zip(P, Q)]
            if cs[-1] == 0:
                continue
            acc = np.zeros(p, dtype=np.int64)
            for c in reversed(cs):
                acc = (acc * xs + c) % p
            if not np.any(acc == 0):
                return True
    return False


@lru_cache(maxsize=65536)
def k_roots(f: KPoly) -> tuple[KElem, ...]:
    """All roots of f lying in K, sorted, without multiplicity."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    D = f.D
    K = quad_field(D)
    if f.degree < 1:
        return ()
    roots: set[KElem] = set()
    # strip factors of x, which the norm factorization would treat the same way anyway
    coeffs = list(f.coeffs)
    if coeffs[0].is_zero():
        roots.add(K.zero)
        while coeffs[0].is_zero():
            coeffs.pop(0)
        f = KPoly(D, tuple(coeffs))
        if f.degree < 1:
            return (K.zero,)
    P, Q = _integral_parts(f)
    if _no_root_mod(P, Q, D):
        return tuple(sorted(roots, key=_root_key))
    # norm polynomial P^2 - D Q^2 in Z[x]; roots of f in K are among its roots
    n = len(P)
    g = [0] * (2 * n - 1)
    for i in range(n):
        for j in range(n):
            g[i + j] += P[i] * P[j] - D * Q[i] * Q[j]
    _, factors = dup_factor_list([ZZ(c) for c in reversed(g)], ZZ)
    for fac, _mult in factors:
        fac = [int(c) for c in fac]
        if len(fac) == 2:
            u, v = fac
            cands = [K(Fraction(-v, u))]
        elif len(fac) == 3:
            u, v, w = fac
            r = K(v * v - 4 * u * w).sqrt()
            if r is None:
                continue
            cands = [(r - v) / (2 * u), (-r - v) / (2 * u)]
        else:
            continue
        for x in cands:
            if f(x).is_zero():
                roots.add(x)
    return tuple(sorted(roots, key=_root_key))


def _root_key(x: KElem) -> tuple:
    return (x.a, x.b)


# ---------------------------------------------------------------------------
# towers: K itself or L = K(sqrt(d))


def as_ext(F: FieldOrExt) -> QuadExt | None:
    if F is None or isinstance(F, QuadExt):
        return F
    if isinstance(F, SquareClass):
        return QuadExt(F.rep)
    return QuadExt(F)


def _sqrt(x):
    return x.sqrt()


def _embed(x, ext: QuadExt | None):
    if ext is None or isinstance(x, LElem):
        return x
    return ext.embed(x)


# ---------------------------------------------------------------------------
# halving


def lift_quantities(E: Curve, P: Point) -> tuple:
    """(x0, x0+M, x0+N); one slot is zero exactly when P has order 2."""
    if P.is_infinity:
        raise ValueError("the point at infinity has no lift quantities")
    return (P.x, P.x + E.M, P.x + E.N)


def nonzero_lift_quantities(E: Curve, P: Point) -> tuple:
    return tuple(q for q in lift_quantities(E, P) if q)


def lifts_in(E: Curve, P: Point, F: FieldOrExt = None) -> bool:
    ext = as_ext(F)
    return all(_embed(q, ext).sqrt() is not None for q in nonzero_lift_quantities(E, P))


def halve(E: Curve, P: Point, F: FieldOrExt = None) -> list[Point]:
    """All Q over F with 2Q = P."""
    ext = as_ext(F)
    if P.is_infinity:
        raise ValueError("halving the identity gives 2-torsion; use two_torsion")
    rs = []
    for q in lift_quantities(E, P):
        q = _embed(q, ext)
        r = q.sqrt() if q else q
        if r is None:
            raise NoLift(f"{P} does not halve over {ext or 'K'}")
        rs.append(r)
    r1, r2, r3 = rs
    Pe = Point(_embed(P.x, ext), _embed(P.y, ext))
    out: list[Point] = []
    seen = set()
    for s2 in (1, -1):
        for s3 in (1, -1):
            a, b, c = r1, s2 * r2, s3 * r3
            x = Pe.x + a * b + a * c + b * c
            y0 = (a + b) * (a + c) * (b + c)
            for y in (y0, -y0):
                if (x, y) in seen:
                    continue
                Q = Point(x, y)
                if E.double(Q) == Pe:
                    seen.add((x, y))
                    out.append(Q)
    if len(out) != 4:
        raise ArithmeticError(f"expected 4 halves of {P}, found {len(out)}")
    return out


def max_chain() -> int:
    raw = os.environ.get("TORSIONLAB_MAX_CHAIN")
    return int(raw) if raw else DEFAULT_MAX_CHAIN


@dataclass(frozen=True)
class TwoChain:
    """Points of exact order 2^k, level by level, and the exponents (a, b)."""

    levels: tuple[tuple[Point, ...], ...]
    a: int
    b: int

    @property
    def counts(self) -> tuple[int, ...]:
        """N_k = #E(F)[2^k] for k = 0, 1, ..."""
        out = [1]
        for lvl in self.levels:
            out.append(out[-1] + len(lvl))
        return tuple(out)

    def points(self) -> list[Point]:
        return [P for lvl in self.levels for P in lvl]

    def x_levels(self) -> list[set]:
        return [{P.x for P in lvl} for lvl in self.levels]


def _exponents_from_counts(counts: list[int]) -> tuple[int, int]:
    a = b = 0
    for prev, cur in zip(counts, counts[1:]):
        ratio = cur // prev
        if cur % prev or ratio not in (2, 4):
            raise ArithmeticError(f"inconsistent 2-power counts {counts}")
        b += 1
        if ratio == 4:
            a += 1
    return a, b


def two_power_subgroup(E: Curve, F: FieldOrExt = None) -> TwoChain:
    ext = as_ext(F)
    return _two_chain(E, ext, max_chain())


@lru_cache(maxsize=16384)
def _two_chain(E: Curve, ext: QuadExt | None, cap: int) -> TwoChain:
    level = [Point(_embed(P.x, ext), _embed(P.y, ext)) for P in E.two_torsion()]
    levels = [tuple(level)]
    order = 2
    while True:
        nxt: list[Point] = []
        for P in level:
            if lifts_in(E, P, ext):
                nxt.extend(halve(E, P, ext))
        if not nxt:
            break
        order *= 2
        if order > cap:
            raise CapExceeded(f"{E}: 2-power torsion over {ext or 'K'} exceeds order {cap}")
        levels.append(tuple(nxt))
        level = nxt
    counts = [1]
    for lvl in levels:
        counts.append(counts[-1] + len(lvl))
    a, b = _exponents_from_counts(counts)
    return TwoChain(tuple(levels), a, b)


# ---------------------------------------------------------------------------
# odd part


@dataclass(frozen=True)
class OddPart:
    r3: int  # 0, 1 or 2 copies of C3
    r5: int  # 0 or 1 copy of C5 (2 is impossible but representable)
    points: tuple[Point, ...] = ()


@lru_cache(maxsize=16384)
def odd_roots(E: Curve) -> tuple[tuple[int, KElem, KElem], ...]:
    """(n, x0, rhs(x0)) for every K-root x0 of psi_3 and of psi_5 on E."""
    out = []
    for n in (3, 5):
        for x0 in k_roots(_division_factors(E, n)):
            out.append((n, x0, E.rhs(x0)))
    return tuple(out)


def _rank_from_count(count: int, p: int) -> int:
    if count == 0:
        return 0
    if count == p - 1:
        return 1
    if count == p * p - 1:
        return 2
    raise ArithmeticError(f"{count} points of order {p} is not a group")


def odd_points(E: Curve, d: KElem | SquareClass | None = None) -> OddPart:
    """Odd torsion of E over K, or of the twist E(dM, dN) when d is given.

    Twisting scales the x-coordinates of odd-order points by d and the cubic
    by d^3, so the twist reuses the roots found for E."""
    if isinstance(d, SquareClass):
        d = d.rep
    counts = {3: 0, 5: 0}
    pts: list[Point] = []
    for n, x0, rhs in odd_roots(E):
        val = rhs if d is None else d * rhs
        y = val.sqrt()
        if y is None or y.is_zero():
            continue
        x = x0 if d is None else d * x0
        yy = y if d is None else d * y
        counts[n] += 2
        pts.extend([Point(x, yy), Point(x, -yy)])
    return OddPart(_rank_from_count(counts[3], 3), _rank_from_count(counts[5], 5), tuple(pts))


def torsion_over_k(E: Curve) -> TorsionShape:
    chain = two_power_subgroup(E)
    odd = odd_points(E)
    shape = TorsionShape.from_parts(chain.a, chain.b, odd.r3, odd.r5)
    if E.D in _CATALOG and (shape.m, shape.n) not in _CATALOG[E.D]:
        raise CatalogViolation(f"{E} computed as {shape}, outside the catalog for D={E.D}")
    return shape


def torsion_over_ext(E: Curve, d: KElem | SquareClass | QuadExt) -> TorsionShape:
    ext = as_ext(d)
    chain = two_power_subgroup(E, ext)
    own = odd_points(E)
    twisted = odd_points(E, ext.d)
    return TorsionShape.from_parts(chain.a, chain.b, own.r3 + twisted.r3, own.r5 + twisted.r5)


def torsion_of_twist(E: Curve, d: KElem | SquareClass) -> TorsionShape:
    """Shape over K of E(dM, dN)."""
    if isinstance(d, SquareClass):
        d = d.rep
    return torsion_over_k(E.twist(d))


def exact_order_points(E: Curve, n: int) -> list[KElem]:
    """K-roots of psi_n that are not roots of psi_m for proper divisors m of n."""
    roots = set(k_roots(psi_n(E, n)))
    for m in range(1, n):
        if n % m == 0:
            roots -= set(k_roots(psi_n(E, m))) if m > 1 else set()
    return sorted(roots, key=_root_key)


def point_order(E: Curve, P: Point, bound: int = 64) -> int | None:
    return E.order(P, bound)


__all__ = [
    "CapExceeded",
    "CatalogViolation",
    "INFINITY",
    "KPoly",
    "NoLift",
    "OddPart",
    "TorsionShape",
    "TwoChain",
    "catalog",
    "exact_order_points",
    "halve",
    "k_roots",
    "lift_quantities",
    "lifts_in",
    "odd_points",
    "psi3",
    "psi_n",
    "square_class",
    "torsion_of_twist",
    "torsion_over_ext",
    "torsion_over_k",
    "two_power_subgroup",
]
