"""Independent reference computations built on sympy, used only by the tests."""
from __future__ import annotations

from functools import lru_cache

from sympy import Poly, Rational, expand, sqrt, symbols

X, Y = symbols("x y")


def sym(elem):
    """A field element as a sympy expression a + b*sqrt(D)."""
    return Rational(elem.a.numerator, elem.a.denominator) + Rational(elem.b.numerator, elem.b.denominator) * sqrt(elem.D)


@lru_cache(maxsize=None)
def division_polynomials(A, B, n_max: int = 10) -> dict:
    """psi_n for y^2 = x^3 + A x^2 + B x via the classical recurrence in x and y,
    with y^2 reduced back to the cubic after every step."""
    b2, b4, b6, b8 = 4 * A, 2 * B, 0, -B * B
    cubic = X ** 3 + A * X ** 2 + B * X

    def reduce_y(e):
        p = Poly(expand(e), Y)
        out = 0
        for (k,), c in p.terms():
            out += c * cubic ** (k // 2) * Y ** (k % 2)
        return expand(out)

    ps = {
        0: 0,
        1: 1,
        2: 2 * Y,
        3: 3 * X ** 4 + b2 * X ** 3 + 3 * b4 * X ** 2 + 3 * b6 * X + b8,
        4: 2 * Y * (2 * X ** 6 + b2 * X ** 5 + 5 * b4 * X ** 4 + 10 * b6 * X ** 3 + 10 * b8 * X ** 2
                    + (b2 * b8 - b4 * b6) * X + (b4 * b8 - b6 ** 2)),
    }
    for k in range(5, n_max + 1):
        m = k // 2
        if k % 2:
            ps[k] = reduce_y(ps[m + 2] * ps[m] ** 3 - ps[m - 1] * ps[m + 1] ** 3)
        else:
            ps[k] = reduce_y(expand(ps[m] * (ps[m + 2] * ps[m - 1] ** 2 - ps[m - 2] * ps[m + 1] ** 2)) / (2 * Y))
    return ps


def x_part(n: int, A, B):
    """psi_n for odd n, psi_n / (2y) for even n, as a polynomial in x."""
    e = division_polynomials(A, B)[n]
    if n % 2 == 0:
        e = expand(e / (2 * Y))
    return expand(e)


def chord_tangent(P, Q, A, B):
    """Group law on y^2 = x^3 + A x^2 + B x with sympy numbers; None is infinity."""
    if P is None:
        return Q
    if Q is None:
        return P
    if P[0] == Q[0] and expand(P[1] + Q[1]) == 0:
        return None
    if P == Q:
        lam = (3 * P[0] ** 2 + 2 * A * P[0] + B) / (2 * P[1])
    else:
        lam = (Q[1] - P[1]) / (Q[0] - P[0])
    x3 = expand(lam ** 2 - A - P[0] - Q[0])
    return x3, expand(-(P[1] + lam * (x3 - P[0])))
