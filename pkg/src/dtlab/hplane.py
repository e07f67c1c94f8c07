"""Upper half-plane primitives: points, PSL(2,R) elements, distances and angles.

Angles are measured in the Euclidean sense of the ambient plane, which the
upper half-plane model preserves because it is conformal.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DegenerateVertex, IdentityIsometry, NonElliptic

TWO_PI = 2.0 * math.pi

# Configurable tolerances (mutate in place to adjust globally).
TOL = {
    "point": 1e-9,      # coincidence of points
    "identity": 1e-10,  # closeness to +-Id
    "elliptic": 1e-9,   # margin below |trace| = 2
}


def wrap(theta: float) -> float:
    """Reduce an angle to [0, 2pi)."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t -= TWO_PI
    return t


def wrap_signed(theta: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    t = wrap(theta)
    return t - TWO_PI if t > math.pi else t


def angle_gap(a: float, b: float) -> float:
    """Distance between two angles on the circle."""
    return abs(wrap_signed(a - b))


@dataclass(frozen=True, slots=True)
class PlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not (self.y > 0.0) or not math.isfinite(self.x):
            raise ValueError(f"point must lie in the upper half-plane, got ({self.x}, {self.y})")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "PlanePoint":
        return cls(z.real, z.imag)

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y}

    @classmethod
    def from_json(cls, d: dict) -> "PlanePoint":
        return cls(float(d["x"]), float(d["y"]))


I_POINT = PlanePoint(0.0, 1.0)


@dataclass(frozen=True, slots=True)
class Isometry:
    """A PSL(2,R) element; the matrices m and -m represent the same isometry."""

    a: float
    b: float
    c: float
    d: float

    def __matmul__(self, o: "Isometry") -> "Isometry":
        return Isometry(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def inv(self) -> "Isometry":
        return Isometry(self.d, -self.b, -self.c, self.a)

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def trace(self) -> float:
        return self.a + self.d

    def normalized(self) -> "Isometry":
        """Scale to determinant one and make the first nonzero entry positive."""
        det = self.det()
        if det <= 0:
            raise ValueError("matrix is not orientation preserving")
        s = 1.0 / math.sqrt(det)
        entries = (self.a * s, self.b * s, self.c * s, self.d * s)
        for e in entries:
            if abs(e) > 1e-300:
                if e < 0:
                    entries = tuple(-v for v in entries)
                break
        return Isometry(*entries)

    def act(self, p: PlanePoint) -> PlanePoint:
        z = p.z
        return PlanePoint.from_complex((self.a * z + self.b) / (self.c * z + self.d))

    def entries(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def distance(self, o: "Isometry") -> float:
        """Frobenius distance in PSL(2,R): min over the two sign choices."""
        p = math.sqrt((self.a - o.a) ** 2 + (self.b - o.b) ** 2 + (self.c - o.c) ** 2 + (self.d - o.d) ** 2)
        m = math.sqrt((self.a + o.a) ** 2 + (self.b + o.b) ** 2 + (self.c + o.c) ** 2 + (self.d + o.d) ** 2)
        return min(p, m)

    def close_to(self, o: "Isometry", tol: float | None = None) -> bool:
        tol = TOL["identity"] if tol is None else tol
        return self.distance(o) < tol

    def is_identity(self, tol: float | None = None) -> bool:
        return self.close_to(IDENTITY, tol)

    def __eq__(self, o: object) -> bool:
        if not isinstance(o, Isometry):
            return NotImplemented
        return self.normalized().close_to(o.normalized())

    def __hash__(self):
        n = self.normalized()
        return hash(tuple(round(v, 8) for v in n.entries()))

    def to_json(self) -> dict:
        return {"m": list(self.entries())}

    @classmethod
    def from_json(cls, d: dict) -> "Isometry":
        return cls(*map(float, d["m"]))


IDENTITY = Isometry(1.0, 0.0, 0.0, 1.0)


def _to_i(p: PlanePoint) -> Isometry:
    """The affine map z -> y z + x sending i to p."""
    s = math.sqrt(p.y)
    return Isometry(s, p.x / s, 0.0, 1.0 / s)


def _rot_i(theta: float) -> Isometry:
    h = 0.5 * theta
    c, s = math.cos(h), math.sin(h)
    return Isometry(c, s, -s, c)


def rotation(center: PlanePoint, theta: float) -> Isometry:
    """Elliptic isometry fixing center and turning tangent vectors counterclockwise by theta."""
    h = _to_i(center)
    return h @ _rot_i(theta) @ h.inv()


def translate_to(p: PlanePoint, q: PlanePoint, theta: float = 0.0) -> Isometry:
    """An isometry sending p to q and turning directions by theta."""
    return _to_i(q) @ _rot_i(theta) @ _to_i(p).inv()


def dist(p: PlanePoint, q: PlanePoint) -> float:
    dx = p.x - q.x
    dy = p.y - q.y
    return 2.0 * math.asinh(math.sqrt(dx * dx + dy * dy) / (2.0 * math.sqrt(p.y * q.y)))


def direction(p: PlanePoint, q: PlanePoint) -> float:
    """Absolute direction in [0, 2pi) of the unit tangent at p of the geodesic to q."""
    zp, zq = p.z, q.z
    if abs(zq - zp) < TOL["point"] * max(1.0, p.y):
        raise DegenerateVertex("direction undefined between coincident points")
    return wrap(cmath.phase((zq - zp) / (zq - zp.conjugate())) + 0.5 * math.pi)


def shoot(p: PlanePoint, theta: float, d: float) -> PlanePoint:
    """Endpoint of the geodesic segment of length d leaving p in absolute direction theta."""
    g = _to_i(p) @ _rot_i(theta - 0.5 * math.pi)
    return g.act(PlanePoint(0.0, math.exp(d)))


def oriented_angle(a: PlanePoint, p: PlanePoint, b: PlanePoint) -> float:
    """Counterclockwise angle at p turning the ray p->b onto the ray p->a, in [0, 2pi)."""
    try:
        return wrap(direction(p, a) - direction(p, b))
    except DegenerateVertex:
        raise DegenerateVertex("oriented angle at a vertex coinciding with an endpoint") from None


def interior_angle(a: PlanePoint, p: PlanePoint, b: PlanePoint) -> float:
    """Unoriented angle at p between the rays to a and b, in [0, pi]."""
    return abs(wrap_signed(oriented_angle(a, p, b)))


def _check_elliptic(g: Isometry) -> tuple[Isometry, float]:
    det = g.det()
    if det <= 0:
        raise NonElliptic("matrix has nonpositive determinant")
    s = 1.0 / math.sqrt(det)
    gn = Isometry(g.a * s, g.b * s, g.c * s, g.d * s)
    tr = gn.trace()
    if abs(tr) >= 2.0 - TOL["elliptic"]:
        if gn.is_identity():
            raise IdentityIsometry("isometry is the identity")
        raise NonElliptic(f"|trace| = {abs(tr):.12g} is not below 2")
    return gn, tr


def fixed_point(g: Isometry) -> PlanePoint:
    gn, tr = _check_elliptic(g)
    root = math.sqrt(4.0 - tr * tr)
    sign = 1.0 if gn.c > 0 else -1.0
    return PlanePoint((gn.a - gn.d) / (2.0 * gn.c), sign * root / (2.0 * gn.c))


def rotation_angle(g: Isometry) -> float:
    """Counterclockwise rotation angle in (0, 2pi) of an elliptic isometry."""
    gn, _ = _check_elliptic(g)
    p = fixed_point(gn)
    # derivative at the fixed point is (c p + d)^(-2)
    return wrap(-2.0 * cmath.phase(gn.c * p.z + gn.d))


def is_elliptic(g: Isometry) -> bool:
    try:
        _check_elliptic(g)
    except (NonElliptic, IdentityIsometry):
        return False
    return True


def points_close(p: PlanePoint, q: PlanePoint, tol: float | None = None) -> bool:
    tol = TOL["point"] if tol is None else tol
    return dist(p, q) < tol
