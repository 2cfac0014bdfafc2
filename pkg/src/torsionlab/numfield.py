"""Exact arithmetic in K = Q(sqrt(D)), its ring of integers, and quadratic
extensions L = K(sqrt(d)).

Elements of K are stored as an integer triple (a, b, c) meaning
(a + b*sqrt(D)) / c with c > 0 and gcd(a, b, c) = 1, which keeps the hot
paths (multiplication, square tests) in plain integer arithmetic.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from sympy import factorint
from sympy.ntheory import sqrt_mod

SUPPORTED_D = (-1, -2, -3, -7, -11)
THEOREM_D = (-1, -3)


class FieldMismatch(ValueError):
    pass


class NotIntegral(ValueError):
    pass


class ParseError(ValueError):
    pass


def _isqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _rat_sqrt(q: Fraction) -> Fraction | None:
    n = _isqrt_exact(q.numerator)
    if n is None:
        return None
    d = _isqrt_exact(q.denominator)
    if d is None:
        return None
    return Fraction(n, d)


class KElem:
    """An element (a + b*sqrt(D)) / c of Q(sqrt(D))."""

    __slots__ = ("D", "_a", "_b", "_c")

    def __init__(self, D: int, a: int | Fraction = 0, b: int | Fraction = 0):
        a = Fraction(a)
        b = Fraction(b)
        c = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        self._set(D, int(a * c), int(b * c), c)

    def _set(self, D, a, b, c):
        g = math.gcd(a, b, c)
        if g != 1:
            a //= g
            b //= g
            c //= g
        self.D = D
        self._a = a
        self._b = b
        self._c = c

    @classmethod
    def _raw(cls, D: int, a: int, b: int, c: int) -> KElem:
        obj = object.__new__(cls)
        obj._set(D, a, b, c)
        return obj

    # -- accessors --------------------------------------------------------
    @property
    def a(self) -> Fraction:
        return Fraction(self._a, self._c)

    @property
    def b(self) -> Fraction:
        return Fraction(self._b, self._c)

    @property
    def field(self) -> QuadField:
        return quad_field(self.D)

    @property
    def triple(self) -> tuple[int, int, int]:
        return self._a, self._b, self._c

    def is_rational(self) -> bool:
        return self._b == 0

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, KElem):
            if other.D != self.D:
                raise FieldMismatch(f"D={self.D} vs D={other.D}")
            return other
        if isinstance(other, int):
            return KElem._raw(self.D, other, 0, 1)
        if isinstance(other, Fraction):
            return KElem._raw(self.D, other.numerator, 0, other.denominator)
        return None

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        c1, c2 = self._c, o._c
        return KElem._raw(self.D, self._a * c2 + o._a * c1, self._b * c2 + o._b * c1, c1 * c2)

    __radd__ = __add__

    def __neg__(self):
        return KElem._raw(self.D, -self._a, -self._b, self._c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        c1, c2 = self._c, o._c
        return KElem._raw(self.D, self._a * c2 - o._a * c1, self._b * c2 - o._b * c1, c1 * c2)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a1, b1, a2, b2 = self._a, self._b, o._a, o._b
        return KElem._raw(self.D, a1 * a2 + self.D * b1 * b2, a1 * b2 + a2 * b1, self._c * o._c)

    __rmul__ = __mul__

    def inverse(self) -> KElem:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in K")
        a, b, c = self._a, self._b, self._c
        n = a * a - self.D * b * b
        if n < 0:
            a, b, c, n = -a, -b, -c, -n
        return KElem._raw(self.D, c * a, -c * b, n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = KElem._raw(self.D, 1, 0, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and Fraction(self._a, self._c) == other
        if isinstance(other, KElem):
            return (self.D, self._a, self._b, self._c) == (other.D, other._a, other._b, other._c)
        return NotImplemented

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._c))
        return hash((self.D, self._a, self._b, self._c))

    # -- field operations -------------------------------------------------
    def conj(self) -> KElem:
        return KElem._raw(self.D, self._a, -self._b, self._c)

    def norm(self) -> Fraction:
        return Fraction(self._a * self._a - self.D * self._b * self._b, self._c * self._c)

    def trace(self) -> Fraction:
        return Fraction(2 * self._a, self._c)

    def sqrt(self) -> KElem | None:
        """Return a square root in K, or None.

        Of the two roots the one with positive rational part (or, for purely
        irrational roots, positive sqrt(D)-coefficient) is returned.
        """
        if self.is_zero():
            return self
        D, c = self.D, self._c
        # self = (A + B*sqrt(D)) / c^2
        A, B = self._a * c, self._b * c
        if B == 0:
            r = _isqrt_exact(A)
            if r is not None:
                return KElem._raw(D, r, 0, c)
            if A % D == 0:
                q = _isqrt_exact(A // D)
                if q is not None:
                    return KElem._raw(D, 0, q, c)
            return None
        n = _isqrt_exact(A * A - D * B * B)
        if n is None:
            return None
        for s in (n, -n):
            # p^2 = (A + s)/2, so (2p)^2 = 2(A + s)
            m = _isqrt_exact(2 * (A + s))
            if not m:
                continue
            # p = m/2, q = B/m, root = (m/2 + (B/m) sqrt(D)) / c
            root = KElem._raw(D, m * m, 2 * B, 2 * m * c)
            if root * root == self:
                return root
        return None

    def is_square(self) -> bool:
        return self.sqrt() is not None

    # -- integral structure ----------------------------------------------
    def ok_coords(self) -> tuple[Fraction, Fraction]:
        """Coordinates (x, y) in the integral basis {1, omega}."""
        a, b = self.a, self.b
        if self.D % 4 == 1:
            return a - b, 2 * b
        return a, b

    def is_integral(self) -> bool:
        x, y = self.ok_coords()
        return x.denominator == 1 and y.denominator == 1

    def ok_int_coords(self) -> tuple[int, int]:
        x, y = self.ok_coords()
        if x.denominator != 1 or y.denominator != 1:
            raise NotIntegral(str(self))
        return int(x), int(y)

    def height(self) -> int:
        return max(_coord_height(t) for t in self.ok_coords())

    # -- text -------------------------------------------------------------
    def __str__(self):
        return format_elem(self)

    def __repr__(self):
        return f"KElem({self.D}, {self.a}, {self.b})"


def _coord_height(t: Fraction) -> int:
    if t.denominator == 1:
        return abs(t.numerator)
    return max(abs(t.numerator), t.denominator)


@dataclass(frozen=True)
class QuadField:
    """The imaginary quadratic field Q(sqrt(D)) for a supported D."""

    D: int

    def __post_init__(self):
        if self.D not in SUPPORTED_D:
            raise ValueError(f"unsupported D={self.D}; expected one of {SUPPORTED_D}")

    def __call__(self, a=0, b=0) -> KElem:
        return KElem(self.D, a, b)

    @property
    def zero(self) -> KElem:
        return KElem._raw(self.D, 0, 0, 1)

    @property
    def one(self) -> KElem:
        return KElem._raw(self.D, 1, 0, 1)

    @property
    def w(self) -> KElem:
        """sqrt(D)."""
        return KElem._raw(self.D, 0, 1, 1)

    @property
    def omega(self) -> KElem:
        if self.D % 4 == 1:
            return KElem._raw(self.D, 1, 1, 2)
        return self.w

    @property
    def disc(self) -> int:
        return self.D if self.D % 4 == 1 else 4 * self.D

    @property
    def theorem_field(self) -> bool:
        return self.D in THEOREM_D

    def coerce(self, x) -> KElem:
        if isinstance(x, KElem):
            if x.D != self.D:
                raise FieldMismatch(f"D={x.D} vs D={self.D}")
            return x
        if isinstance(x, str):
            return self.parse(x)
        return KElem(self.D, x)

    def from_ok(self, x: int, y: int) -> KElem:
        if self.D % 4 == 1:
            return KElem._raw(self.D, 2 * x + y, y, 2)
        return KElem._raw(self.D, x, y, 1)

    def units(self) -> list[KElem]:
        one = self.one
        if self.D == -1:
            return [one, -one, self.w, -self.w]
        if self.D == -3:
            lam = self.lam
            return [one, -one, lam, -lam, lam * lam, -(lam * lam)]
        return [one, -one]

    @property
    def lam(self) -> KElem:
        """Primitive cube root of unity -1/2 + sqrt(-3)/2 (D=-3 only)."""
        if self.D != -3:
            raise ValueError("lambda is only defined for D=-3")
        return KElem._raw(-3, -1, 1, 2)

    @property
    def nonsquare_unit(self) -> KElem:
        return self.w if self.D == -1 else -self.one

    def parse(self, text: str) -> KElem:
        return parse_elem(text, self.D)


@lru_cache(maxsize=None)
def quad_field(D: int) -> QuadField:
    return QuadField(D)


# ---------------------------------------------------------------------------
# text syntax


def format_elem(x: KElem) -> str:
    a, b = x.a, x.b
    if b == 0:
        return str(a)
    if b == 1:
        tail = "w"
    elif b == -1:
        tail = "-w"
    else:
        tail = f"{b}*w"
    if a == 0:
        return tail
    if tail.startswith("-"):
        return f"{a}{tail}"
    return f"{a}+{tail}"


_TOKEN = re.compile(r"\s*(?:(\d+)|(λ|lambda|lam|w|i|sqrt\(-?\d+\))|(\*\*|[-+*/^()]))")


def parse_elem(text: str, D: int) -> KElem:
    """Parse an element of Q(sqrt(D)).

    Grammar: sums/products/quotients/integer powers of integers, ``w``
    (sqrt(D)), parentheses; ``i`` is accepted for D=-1 and ``λ``/``lam``
    for D=-3.
    """
    K = quad_field(D)
    tokens: list[tuple[str, str]] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse {text!r} at position {pos}")
        num, sym, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif sym is not None:
            tokens.append(("sym", sym))
        else:
            tokens.append(("op", op))
        pos = m.end()
    if not tokens:
        raise ParseError("empty element")

    idx = 0

    def peek():
        return tokens[idx] if idx < len(tokens) else (None, None)

    def take():
        nonlocal idx
        tok = tokens[idx]
        idx += 1
        return tok

    def atom() -> KElem:
        kind, val = peek()
        if kind == "num":
            take()
            return K(int(val))
        if kind == "sym":
            take()
            if val == "w":
                return K.w
            if val == "i":
                if D != -1:
                    raise ParseError("'i' is only available for D=-1")
                return K.w
            if val in ("λ", "lambda", "lam"):
                if D != -3:
                    raise ParseError("λ is only available for D=-3")
                return K.lam
            inner = int(val[5:-1])
            if inner != D:
                raise ParseError(f"{val} does not belong to D={D}")
            return K.w
        if (kind, val) == ("op", "("):
            take()
            v = expr()
            if take() != ("op", ")"):
                raise ParseError("unbalanced parentheses")
            return v
        if (kind, val) == ("op", "-"):
            take()
            return -power()
        if (kind, val) == ("op", "+"):
            take()
            return power()
        raise ParseError(f"unexpected token {val!r} in {text!r}")

    def power() -> KElem:
        base = atom()
        if peek() in (("op", "^"), ("op", "**")):
            take()
            neg = False
            if peek() == ("op", "-"):
                take()
                neg = True
            kind, val = take()
            if kind != "num":
                raise ParseError("exponent must be an integer")
            e = int(val)
            return base ** (-e if neg else e)
        return base

    def term() -> KElem:
        v = power()
        while peek() in (("op", "*"), ("op", "/")):
            _, op = take()
            rhs = power()
            if op == "*":
                v = v * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero")
                v = v / rhs
        return v

    def expr() -> KElem:
        v = term()
        while peek() in (("op", "+"), ("op", "-")):
            _, op = take()
            rhs = term()
            v = v + rhs if op == "+" else v - rhs
        return v

    try:
        result = expr()
    except IndexError:
        raise ParseError(f"truncated expression {text!r}") from None
    if idx != len(tokens):
        raise ParseError(f"trailing input in {text!r}")
    return result


# ---------------------------------------------------------------------------
# ring of integers: Euclidean division, gcd, factorization


def _require_integral(x: KElem) -> tuple[int, int]:
    return x.ok_int_coords()


def canonical_associate(x: KElem) -> KElem:
    """The associate minimizing (y < 0, x < 0, |y|, |x|) in integral-basis coordinates."""
    if x.is_zero():
        return x
    best = None
    best_key = None
    for u in x.field.units():
        cand = x * u
        cx, cy = cand.ok_coords()
        key = (cy < 0, cx < 0, abs(cy), abs(cx))
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best


def ok_divmod(a: KElem, b: KElem) -> tuple[KElem, KElem]:
    if b.is_zero():
        raise ZeroDivisionError("division by zero in O_K")
    K = a.field
    qx, qy = (a / b).ok_coords()
    best = None
    for x in (math.floor(qx), math.ceil(qx)):
        for y in (math.floor(qy), math.ceil(qy)):
            q = K.from_ok(x, y)
            r = a - q * b
            n = r.norm()
            if best is None or n < best[0]:
                best = (n, q, r)
    if best[0] >= b.norm():
        raise ArithmeticError(f"D={K.D} division step failed to reduce the norm")
    return best[1], best[2]


def ok_gcd(a: KElem, b: KElem) -> KElem:
    _require_integral(a)
    _require_integral(b)
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    while not b.is_zero():
        _, r = ok_divmod(a, b)
        a, b = b, r
    return canonical_associate(a)


def divides(p: KElem, x: KElem) -> bool:
    return (x / p).is_integral()


def is_unit(x: KElem) -> bool:
    return x.is_integral() and x.norm() == 1


def _omega_roots_mod(D: int, p: int) -> list[int]:
    """Roots mod p of the minimal polynomial of omega."""
    if D % 4 == 1:
        b, c = -1, (1 - D) // 4
    else:
        b, c = 0, -D
    if p == 2:
        return [t for t in (0, 1) if (t * t + b * t + c) % 2 == 0]
    disc = (b * b - 4 * c) % p
    s = sqrt_mod(disc, p)
    if s is None:
        return []
    inv2 = pow(2, -1, p)
    return sorted({((-b + s) * inv2) % p, ((-b - s) * inv2) % p})


@lru_cache(maxsize=4096)
def primes_above(D: int, p: int) -> tuple[KElem, ...]:
    """Canonical primes of O_K lying over the rational prime p."""
    K = quad_field(D)
    roots = _omega_roots_mod(D, p)
    if not roots:
        return (K(p),)
    out = []
    for r in roots:
        g = ok_gcd(K(p), K.omega - r)
        if g.norm() != p:
            raise ArithmeticError(f"failed to split {p} in D={D}")
        if g not in out:
            out.append(g)
    return tuple(sorted(out, key=_sort_key))


def _sort_key(x: KElem) -> tuple:
    cx, cy = x.ok_coords()
    return (x.norm(), cx, cy)


def ok_factor(x: KElem) -> tuple[KElem, list[tuple[KElem, int]]]:
    """Factor x = unit * prod(prime^e) with canonical primes, sorted by norm."""
    _require_integral(x)
    if x.is_zero():
        raise ValueError("cannot factor zero")
    n = int(x.norm())
    factors: list[tuple[KElem, int]] = []
    rest = x
    for p in sorted(factorint(n)):
        for pi in primes_above(x.D, p):
            e = 0
            while True:
                q = rest / pi
                if not q.is_integral():
                    break
                rest = q
                e += 1
            if e:
                factors.append((pi, e))
    if not is_unit(rest):
        raise ArithmeticError(f"factorization of {x} left non-unit {rest}")
    factors.sort(key=lambda f: _sort_key(f[0]))
    return rest, factors


# ---------------------------------------------------------------------------
# square classes


def _integral_multiple(x: KElem) -> KElem:
    """c^2 * x for the denominator c of x; integral and in the same square class."""
    c = x.triple[2]
    return x * (c * c)


@dataclass(frozen=True)
class SquareClass:
    """A class in K*/(K*)^2 with its canonical squarefree representative."""

    D: int
    rep: KElem

    @property
    def field(self) -> QuadField:
        return quad_field(self.D)

    def is_identity(self) -> bool:
        return self.rep == 1

    def contains(self, x: KElem) -> bool:
        return same_class(self.rep, x)

    def __mul__(self, other: SquareClass) -> SquareClass:
        return square_class(self.rep * other.rep)

    def __str__(self):
        return str(self.rep)


def same_class(x: KElem, y: KElem) -> bool:
    if x.is_zero() or y.is_zero():
        raise ValueError("square classes are defined for nonzero elements only")
    return (x * y).is_square()


@lru_cache(maxsize=65536)
def square_class(x: KElem) -> SquareClass:
    if x.is_zero():
        raise ValueError("zero has no square class")
    K = x.field
    y = _integral_multiple(x)
    unit, factors = ok_factor(y)
    rep = K.one
    for pi, e in factors:
        if e % 2:
            rep = rep * pi
    # y / rep = unit * square; pick the unit-class representative
    if not (y / rep).is_square():
        rep = rep * K.nonsquare_unit
    return SquareClass(x.D, rep)


# ---------------------------------------------------------------------------
# heights and enumeration


def height(x: KElem) -> int:
    return x.height()


def enumerate_ok(K: QuadField, H: int) -> Iterator[KElem]:
    """All O_K elements with integral-basis coordinates bounded by H, by height."""
    yield K.zero
    for h in range(1, H + 1):
        shell = [(x, y) for x in range(-h, h + 1) for y in range(-h, h + 1) if max(abs(x), abs(y)) == h]
        for x, y in sorted(shell):
            yield K.from_ok(x, y)


def _rationals_of_height(H: int) -> list[Fraction]:
    out = {Fraction(n) for n in range(-H, H + 1)}
    for q in range(2, H + 1):
        for n in range(-H, H + 1):
            if math.gcd(n, q) == 1:
                out.add(Fraction(n, q))
    return sorted(out, key=lambda t: (_coord_height(t), t))


def enumerate_k(K: QuadField, H: int) -> Iterator[KElem]:
    """All elements of K whose integral-basis coordinates have height <= H."""
    rats = _rationals_of_height(H)
    for x in rats:
        for y in rats:
            if K.D % 4 == 1:
                yield KElem(K.D, x + y / 2, y / 2)
            else:
                yield KElem(K.D, x, y)


def nonsquare_classes(K: QuadField, H: int) -> list[SquareClass]:
    """Distinct non-identity square classes of nonzero O_K elements of height <= H."""
    seen: dict[KElem, SquareClass] = {}
    for x in enumerate_ok(K, H):
        if x.is_zero():
            continue
        cls = square_class(x)
        if not cls.is_identity() and cls.rep not in seen:
            seen[cls.rep] = cls
    return list(seen.values())


# ---------------------------------------------------------------------------
# relative quadratic extensions


@dataclass(frozen=True)
class QuadExt:
    """L = K(sqrt(d)) for a non-square d in K."""

    d: KElem

    def __post_init__(self):
        if self.d.is_zero() or self.d.is_square():
            raise ValueError(f"{self.d} is a square in K; K(sqrt(d)) is not quadratic")

    @property
    def D(self) -> int:
        return self.d.D

    @property
    def base(self) -> QuadField:
        return quad_field(self.d.D)

    @property
    def square_class(self) -> SquareClass:
        return square_class(self.d)

    def __call__(self, u=0, v=0) -> LElem:
        K = self.base
        return LElem(self, K.coerce(u), K.coerce(v))

    @property
    def sqrt_d(self) -> LElem:
        return LElem(self, self.base.zero, self.base.one)

    def embed(self, x) -> LElem:
        return LElem(self, self.base.coerce(x), self.base.zero)

    def __str__(self):
        return f"K(sqrt({self.d}))"


def ext_of(cls: SquareClass | KElem) -> QuadExt:
    return QuadExt(cls.rep if isinstance(cls, SquareClass) else cls)


class LElem:
    """u + v*sqrt(d) in L = K(sqrt(d))."""

    __slots__ = ("ext", "u", "v")

    def __init__(self, ext: QuadExt, u: KElem, v: KElem):
        self.ext = ext
        self.u = u
        self.v = v

    def _coerce(self, other):
        if isinstance(other, LElem):
            if other.ext != self.ext:
                raise FieldMismatch(f"{self.ext} vs {other.ext}")
            return other
        if isinstance(other, (KElem, int, Fraction)):
            K = self.ext.base
            return LElem(self.ext, K.coerce(other), K.zero)
        return None

    def is_zero(self) -> bool:
        return self.u.is_zero() and self.v.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def in_base(self) -> bool:
        return self.v.is_zero()

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return LElem(self.ext, self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __neg__(self):
        return LElem(self.ext, -self.u, -self.v)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return LElem(self.ext, self.u - o.u, self.v - o.v)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self.ext.d
        return LElem(self.ext, self.u * o.u + d * self.v * o.v, self.u * o.v + self.v * o.u)

    __rmul__ = __mul__

    def conj(self) -> LElem:
        return LElem(self.ext, self.u, -self.v)

    def rel_norm(self) -> KElem:
        return self.u * self.u - self.ext.d * self.v * self.v

    def inverse(self) -> LElem:
        n = self.rel_norm()
        if n.is_zero():
            raise ZeroDivisionError("inverse of zero in L")
        ninv = n.inverse()
        return LElem(self.ext, self.u * ninv, -self.v * ninv)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ext.embed(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other) if isinstance(other, (LElem, KElem, int, Fraction)) else None
        if o is None:
            return NotImplemented
        return self.u == o.u and self.v == o.v

    def __hash__(self):
        if self.v.is_zero():
            return hash(self.u)
        return hash((self.ext.d, self.u, self.v))

    def sqrt(self) -> LElem | None:
        """A square root in L, or None."""
        u, v, d = self.u, self.v, self.ext.d
        if v.is_zero():
            r = u.sqrt()
            if r is not None:
                return LElem(self.ext, r, v)
            s = (u / d).sqrt()
            if s is not None:
                return LElem(self.ext, u.field.zero, s)
            return None
        s = (u * u - d * v * v).sqrt()
        if s is None:
            return None
        for cand in (u + s, u - s):
            p = (cand / 2).sqrt()
            if p is None or p.is_zero():
                continue
            q = v / (2 * p)
            root = LElem(self.ext, p, q)
            if root * root == self:
                return root
        return None

    def is_square(self) -> bool:
        return self.sqrt() is not None

    def __str__(self):
        if self.v.is_zero():
            return str(self.u)
        return f"({self.u})+({self.v})*sqrt({self.ext.d})"

    __repr__ = __str__


def is_square_in_ext(x: KElem, ext: QuadExt) -> bool:
    """Whether x in K becomes a square in ext."""
    if x.is_zero():
        raise ValueError("zero input")
    return x.is_square() or (ext.d * x).is_square()
