"""Torsion of elliptic curves with full 2-torsion over imaginary quadratic fields."""
from __future__ import annotations

from .curve import Curve, Point, SingularCurve, new_curve, parse_curve
from .numfield import KElem, QuadExt, SquareClass, quad_field, square_class
from .torsion import TorsionShape, torsion_over_ext, torsion_over_k

__version__ = "0.1.0"

__all__ = [
    "Curve",
    "KElem",
    "Point",
    "QuadExt",
    "SingularCurve",
    "SquareClass",
    "TorsionShape",
    "new_curve",
    "parse_curve",
    "quad_field",
    "square_class",
    "torsion_over_ext",
    "torsion_over_k",
]
