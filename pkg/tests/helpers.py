"""Point sampling for group-law tests, and a division-polynomial cross-check."""
from __future__ import annotations

import random

from torsionlab.curve import Curve, Point
from torsionlab.numfield import enumerate_k
from torsionlab.torsion import KPoly, _division_factors, k_roots, odd_points, two_power_subgroup


def random_points(E: Curve, n: int, seed: int = 0, ext=None, H: int = 4) -> list[Point]:
    """Torsion points, small-height points and random sums of them."""
    pts = list(two_power_subgroup(E, ext).points())
    if ext is None:
        pts += list(odd_points(E).points)
        for x in enumerate_k(E.field, H):
            y = E.rhs(x).sqrt()
            if y is not None and y:
                pts += [Point(x, y), Point(x, -y)]
    rng = random.Random(seed)
    base = list(pts)
    while len(pts) < n and base:
        P, Q = rng.choice(base), rng.choice(pts)
        R = E.add(P, Q)
        if not R.is_infinity:
            pts.append(R)
    rng.shuffle(pts)
    return pts[: max(n, 1)]


def division_levels(E: Curve, depth: int) -> list[set]:
    """x-coordinates of K-points of exact order 2^k, k = 1..depth, read off
    the division polynomials instead of the halving chain."""
    F = KPoly.make(E.D, [0, 4 * E.B, 4 * E.A, 4])
    levels = [set(k_roots(F))]
    prev = _division_factors(E, 2)
    for k in range(2, depth + 1):
        cur = _division_factors(E, 2 ** k)
        q, r = cur.divmod(prev)
        assert r.is_zero()
        levels.append({x for x in k_roots(q) if E.rhs(x).is_square() and not prev(x).is_zero()})
        prev = cur
    return levels
