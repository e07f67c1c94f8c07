import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dtlab.errors import DegenerateVertex, IdentityIsometry, NonElliptic
from dtlab.hplane import (
    I_POINT,
    IDENTITY,
    TWO_PI,
    Isometry,
    PlanePoint,
    angle_gap,
    dist,
    direction,
    fixed_point,
    interior_angle,
    oriented_angle,
    rotation,
    rotation_angle,
    shoot,
    translate_to,
)
from dtlab.trig import locos_angles, realize

coord = st.floats(-3, 3)
height = st.floats(0.05, 5)
angle = st.floats(0.01, TWO_PI - 0.01)
points = st.builds(PlanePoint, coord, height)


def random_isometry(rng):
    while True:
        m = rng.normal(size=4)
        det = m[0] * m[3] - m[1] * m[2]
        if abs(det) > 0.1:
            if det < 0:
                m[0], m[2] = -m[0], -m[2]
                det = -det
            return Isometry(*(m / math.sqrt(det)))


def test_point_validation():
    with pytest.raises(ValueError):
        PlanePoint(0.0, 0.0)
    with pytest.raises(ValueError):
        PlanePoint(1.0, -2.0)
    p = PlanePoint(0.3, 1.7)
    assert PlanePoint.from_json(p.to_json()) == p


def test_sign_classes_compare_equal():
    g = rotation(PlanePoint(0.2, 0.9), 1.1)
    a, b, c, d = g.entries()
    assert Isometry(-a, -b, -c, -d) == g
    assert hash(Isometry(-a, -b, -c, -d)) == hash(g)
    assert abs(g.normalized().det() - 1) < 1e-12


def test_dist_values():
    p = PlanePoint(0.4, 0.8)
    assert dist(p, p) == 0.0
    assert dist(PlanePoint(0, 1), PlanePoint(0, 2)) == pytest.approx(math.log(2), abs=1e-15)
    # horizontal separation on the same height: 2 asinh(|dx| / 2y)
    assert dist(PlanePoint(0, 1), PlanePoint(1, 1)) == pytest.approx(2 * math.asinh(0.5), abs=1e-15)


@given(points, points, st.integers(0, 10_000))
def test_dist_invariant_under_isometries(p, q, s):
    g = random_isometry(np.random.default_rng(s))
    assert dist(g.act(p), g.act(q)) == pytest.approx(dist(p, q), rel=1e-9, abs=1e-9)


@given(points, points, points)
def test_triangle_inequality(p, q, r):
    assert dist(p, r) <= dist(p, q) + dist(q, r) + 1e-9


@given(points, angle, st.floats(0.01, 4))
def test_shoot_direction_round_trip(p, theta, d):
    q = shoot(p, theta, d)
    assert dist(p, q) == pytest.approx(d, rel=1e-9)
    assert angle_gap(direction(p, q), theta) < 1e-8


def test_rotation_examples():
    half = rotation(I_POINT, math.pi)
    assert (half @ half).is_identity()
    p, t = PlanePoint(-0.7, 0.3), 2.1
    assert (rotation(p, t) @ rotation(p, -t)).is_identity()
    # at i the rotation is the standard matrix [[cos a/2, sin a/2], [-sin a/2, cos a/2]]
    a = 1.3
    std = Isometry(math.cos(a / 2), math.sin(a / 2), -math.sin(a / 2), math.cos(a / 2))
    assert rotation(I_POINT, a).distance(std) < 1e-15


def test_rotation_is_counterclockwise():
    # rotating the point above i by a quarter turn moves it to the left half
    q = rotation(I_POINT, math.pi / 2).act(PlanePoint(0, 2))
    assert q.x < 0
    assert angle_gap(direction(I_POINT, q), math.pi) < 1e-12


@given(points, angle)
def test_rotation_angle_and_fixed_point_round_trip(p, theta):
    g = rotation(p, theta)
    assert angle_gap(rotation_angle(g), theta) < 1e-8
    assert dist(fixed_point(g), p) < 1e-8
    assert rotation_angle(g) + rotation_angle(g.inv()) == pytest.approx(TWO_PI, abs=1e-8)
    star = fixed_point(g)
    assert dist(g.act(star), star) < 1e-10


@given(points, angle, st.integers(0, 10_000))
def test_conjugation_equivariance(p, theta, s):
    g = rotation(p, theta)
    h = random_isometry(np.random.default_rng(s))
    conj = h @ g @ h.inv()
    assert angle_gap(rotation_angle(conj), rotation_angle(g)) < 1e-7
    assert dist(fixed_point(conj), h.act(fixed_point(g))) < 1e-7


def test_non_elliptic_errors():
    hyperbolic = Isometry(2.0, 0.0, 0.0, 0.5)
    parabolic = Isometry(1.0, 1.0, 0.0, 1.0)
    for g in (hyperbolic, parabolic):
        with pytest.raises(NonElliptic):
            rotation_angle(g)
        with pytest.raises(NonElliptic):
            fixed_point(g)
    with pytest.raises(IdentityIsometry):
        rotation_angle(IDENTITY)


def test_oriented_angle_contract():
    p, a, b = PlanePoint(0, 1), PlanePoint(1, 2), PlanePoint(-0.5, 0.4)
    assert oriented_angle(a, p, a) == 0.0
    total = oriented_angle(a, p, b) + oriented_angle(b, p, a)
    assert min(total % TWO_PI, TWO_PI - total % TWO_PI) < 1e-12
    with pytest.raises(DegenerateVertex):
        oriented_angle(p, p, b)
    # counterclockwise turn from the ray toward b onto the ray toward a
    up, right = PlanePoint(0, 2), shoot(I_POINT, 0.0, 1.0)
    assert oriented_angle(up, I_POINT, right) == pytest.approx(math.pi / 2, abs=1e-12)


@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_constructed_triangle_angle_sum(A, B, C):
    if A + B + C >= math.pi - 1e-3:
        return
    P, Q, R = realize(locos_angles(A, B, C))
    s = interior_angle(Q, P, R) + interior_angle(P, Q, R) + interior_angle(P, R, Q)
    assert s < math.pi
    assert s == pytest.approx(A + B + C, abs=1e-9)


@given(points, points, angle)
def test_translate_to(p, q, theta):
    g = translate_to(p, q, theta)
    assert dist(g.act(p), q) < 1e-9
    assert abs(g.det() - 1) < 1e-9


def test_json_round_trip():
    g = rotation(PlanePoint(0.1, 0.5), 0.7)
    assert Isometry.from_json(g.to_json()) == g
