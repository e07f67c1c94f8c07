"""Hyperbolic triangle trigonometry and Chebyshev helpers."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AngleSumTooLarge
from .hplane import I_POINT, PlanePoint, shoot

_COSH_FLOOR = 1.0 + 1e-15


@dataclass(frozen=True, slots=True)
class TriangleData:
    """Sides a, b, c and the interior angles A, B, C opposite them."""

    a: float
    b: float
    c: float
    A: float
    B: float
    C: float

    def sides(self):
        return (self.a, self.b, self.c)

    def angles(self):
        return (self.A, self.B, self.C)

    def rotated(self) -> "TriangleData":
        """Relabel (a,b,c) -> (b,c,a) together with their opposite angles."""
        return TriangleData(self.b, self.c, self.a, self.B, self.C, self.A)


def locos_sides(a: float, b: float, C: float) -> float:
    """Side opposite the angle C enclosed between sides a and b."""
    ch = math.cosh(a) * math.cosh(b) - math.sinh(a) * math.sinh(b) * math.cos(C)
    return math.acosh(max(ch, 1.0))


def angle_from_sides(a: float, b: float, c: float) -> float:
    """Angle enclosed by sides a and b, opposite side c."""
    cosv = (math.cosh(a) * math.cosh(b) - math.cosh(c)) / (math.sinh(a) * math.sinh(b))
    return math.acos(min(1.0, max(-1.0, cosv)))


def side_from_angles(A: float, B: float, C: float) -> float:
    """Side opposite C for a triangle with angles A, B, C."""
    ch = (math.cos(A) * math.cos(B) + math.cos(C)) / (math.sin(A) * math.sin(B))
    return math.acosh(max(ch, _COSH_FLOOR))


def locos_angles(A: float, B: float, C: float) -> TriangleData:
    for v in (A, B, C):
        if not (0.0 < v < math.pi):
            raise ValueError(f"angle {v} outside (0, pi)")
    if A + B + C >= math.pi:
        raise AngleSumTooLarge(f"angle sum {A + B + C:.15g} is not below pi")
    return TriangleData(
        side_from_angles(B, C, A),
        side_from_angles(C, A, B),
        side_from_angles(A, B, C),
        A, B, C,
    )


def sine_ratios(t: TriangleData) -> tuple[float, float, float]:
    return (math.sin(t.A) / math.sinh(t.a), math.sin(t.B) / math.sinh(t.b), math.sin(t.C) / math.sinh(t.c))


def four_parts_residual(t: TriangleData) -> float:
    """Four-parts identity around the angle C enclosed between sides a and b."""
    return abs(
        math.cos(t.C) * math.cosh(t.a)
        - math.sinh(t.a) / math.tanh(t.b)
        + math.sin(t.C) / math.tan(t.B)
    )


def realize(t: TriangleData) -> tuple[PlanePoint, PlanePoint, PlanePoint]:
    """Counterclockwise vertices (PA, PB, PC) with PA = i and PA->PB pointing straight up."""
    pa = I_POINT
    pb = shoot(pa, 0.5 * math.pi, t.c)
    pc = shoot(pa, 0.5 * math.pi + t.A, t.b)
    return pa, pb, pc


def cheb_cos(m: int, x):
    """Chebyshev polynomial T_m at x (any real x, scalar or array)."""
    if m < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
    t0, t1 = 1.0 + 0.0 * x, x
    if m == 0:
        return t0
    for _ in range(m - 1):
        t0, t1 = t1, 2.0 * x * t1 - t0
    return t1


def forward_difference(values, order: int) -> np.ndarray:
    return np.diff(np.asarray(values, dtype=float), n=order)


def leading_coefficient(f, degree: int, lo: float = -1.0, hi: float = 1.0) -> float:
    """Leading coefficient of a polynomial of the given degree from a single forward difference.

    On an arithmetic grid of spacing h the degree-th difference equals degree! h^degree times
    the leading coefficient.
    """
    xs = np.linspace(lo, hi, degree + 1)
    h = xs[1] - xs[0]
    vals = np.array([f(x) for x in xs])
    diff = forward_difference(vals, degree)[0]
    return diff / (math.factorial(degree) * h ** degree)
