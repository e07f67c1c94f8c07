import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dtlab.errors import AngleSumTooLarge
from dtlab.hplane import dist, interior_angle
from dtlab.trig import (
    TriangleData,
    angle_from_sides,
    cheb_cos,
    forward_difference,
    four_parts_residual,
    leading_coefficient,
    locos_angles,
    locos_sides,
    realize,
    sine_ratios,
    side_from_angles,
)

side = st.floats(0.05, 4.0)
small_angle = st.floats(0.02, 1.0)


def test_pythagoras():
    a, b = 0.7, 1.3
    c = locos_sides(a, b, math.pi / 2)
    assert math.cosh(c) == pytest.approx(math.cosh(a) * math.cosh(b), rel=1e-14)


@given(side, side, st.floats(0.01, math.pi - 0.01))
def test_locos_symmetric_and_invertible(a, b, C):
    c = locos_sides(a, b, C)
    assert c == pytest.approx(locos_sides(b, a, C), rel=1e-12)
    if c > 1e-3:
        assert angle_from_sides(a, b, c) == pytest.approx(C, abs=1e-6)


def test_equilateral_quarter_turns():
    t = locos_angles(math.pi / 4, math.pi / 4, math.pi / 4)
    for s in t.sides():
        assert math.cosh(s) == pytest.approx(1 + math.sqrt(2), rel=1e-14)


def test_angle_sum_limit_shrinks_sides():
    sizes = [locos_angles(x, x, x).a for x in np.linspace(0.8, math.pi / 3 - 1e-6, 12)]
    assert all(s1 > s2 for s1, s2 in zip(sizes, sizes[1:]))
    assert sizes[-1] < 1e-2


def test_angle_sum_too_large():
    with pytest.raises(AngleSumTooLarge):
        locos_angles(1.0, 1.0, 1.2)
    with pytest.raises(AngleSumTooLarge):
        locos_angles(math.pi / 3, math.pi / 3, math.pi / 3)


@given(small_angle, small_angle, small_angle)
def test_laws_on_solver_output(A, B, C):
    if A + B + C >= math.pi - 1e-3:
        return
    t = locos_angles(A, B, C)
    r = sine_ratios(t)
    assert max(r) - min(r) <= 1e-9 * max(r)
    cur = t
    for _ in range(3):
        assert four_parts_residual(cur) < 1e-10 * max(1.0, math.cosh(cur.a))
        cur = cur.rotated()


@given(small_angle, small_angle, small_angle)
def test_realized_triangle_matches_data(A, B, C):
    if A + B + C >= math.pi - 1e-3:
        return
    t = locos_angles(A, B, C)
    pa, pb, pc = realize(t)
    assert dist(pb, pc) == pytest.approx(t.a, rel=1e-8, abs=1e-10)
    assert dist(pa, pc) == pytest.approx(t.b, rel=1e-8, abs=1e-10)
    assert dist(pa, pb) == pytest.approx(t.c, rel=1e-8, abs=1e-10)
    assert interior_angle(pb, pa, pc) == pytest.approx(A, abs=1e-8)
    assert interior_angle(pa, pb, pc) == pytest.approx(B, abs=1e-8)


def test_four_parts_sensitivity():
    t = locos_angles(0.4, 0.6, 0.9)
    bumped = TriangleData(t.a + 0.1, t.b, t.c, t.A, t.B, t.C)
    assert four_parts_residual(bumped) > 1e-3


def test_four_parts_right_angle():
    # C = pi/2 reduces the identity to coth(b) sinh(a) = cot(B)
    t = locos_angles(0.5, 0.7, math.pi / 2)
    assert math.sinh(t.a) / math.tanh(t.b) == pytest.approx(1 / math.tan(t.B), rel=1e-12)


def test_side_from_angles_matches_solver():
    t = locos_angles(0.3, 0.5, 1.1)
    assert side_from_angles(0.3, 0.5, 1.1) == t.c


def test_cheb_values():
    assert cheb_cos(1, 0.37) == 0.37
    assert cheb_cos(2, 0.6) == pytest.approx(-0.28, abs=1e-15)
    th = np.linspace(0, math.pi, 11)
    for m in range(0, 8):
        assert np.allclose(cheb_cos(m, np.cos(th)), np.cos(m * th), atol=1e-13)


@pytest.mark.parametrize("m", range(1, 7))
def test_leading_coefficient_of_squared_chebyshev(m):
    lead = leading_coefficient(lambda x: cheb_cos(m, x) ** 2, 2 * m, -1.0, 1.0)
    assert lead == pytest.approx(2.0 ** (2 * m - 2), rel=1e-9)


def test_forward_difference_kills_polynomials():
    xs = np.linspace(-2, 2, 9)
    v = 3 * xs ** 5 - xs ** 2 + 1
    assert np.max(np.abs(forward_difference(v, 6))) < 1e-9
    assert abs(forward_difference(v, 5)[0]) > 1.0
