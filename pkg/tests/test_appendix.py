import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dtlab.dynamics.appendix import (
    APPENDIX_EQUATIONS,
    appendix_poly_value,
    appendix_polynomial,
    identity_residuals,
    leading_coefficient_closed_form,
    main_relation_residual,
    pair_config,
    sinh_cosh_identity_residual,
)
from dtlab.dynamics.sampler import random_regular_point, task_rng
from dtlab.dynamics.scans import engineered_eta_point
from dtlab.errors import DegenerateVertex
from dtlab.hplane import dist

TWO_PI = 2 * math.pi


def _configs(count, seed=0, sizes=(5, 6, 7)):
    for t in range(count):
        p = random_regular_point(sizes[t % len(sizes)], task_rng(seed, t))
        yield p, 2 + t % (p.n - 3)


def test_identities_on_thousand_configurations():
    worst = {k: 0.0 for k in APPENDIX_EQUATIONS}
    main = 0.0
    for p, i in _configs(1000):
        cfg = pair_config(p, i)
        res = identity_residuals(cfg)
        for k in APPENDIX_EQUATIONS:
            worst[k] = max(worst[k], res[k])
        main = max(main, main_relation_residual(cfg))
    assert max(worst.values()) < 1e-9, worst
    assert main < 1e-9


@given(st.floats(0.01, 5.0), st.floats(0.01, 5.0))
def test_sinh_cosh_identity(x, y):
    assert sinh_cosh_identity_residual(x, y) < 1e-12


def test_pair_config_geometry(point5):
    cfg = pair_config(point5, 2)
    assert cfg.j == cfg.i + 1
    assert 0 < cfg.upsilon < TWO_PI
    assert 0 < cfg.eps < math.pi and 0 < cfg.eta_interior < math.pi
    assert cfg.dCC == pytest.approx(dist(cfg.Ci, cfg.Cj))
    assert set(cfg.constants()) >= {"alpha_i", "alpha_j", "d1", "d2", "d3"}


def test_pair_config_index_range(point5):
    for bad in (1, 4):
        with pytest.raises(ValueError):
            pair_config(point5, bad)


def test_identities_detect_a_moved_vertex(point5):
    from dtlab.hplane import rotation
    cfg = pair_config(point5, 2)
    cfg.Y1 = rotation(cfg.Cj, 1e-3).act(cfg.Y1)
    assert max(identity_residuals(cfg).values()) > 1e-6


def _power_leading(constants, m):
    # oracle: least-squares Chebyshev fit on many nodes, converted to the power basis
    deg = 2 * m + 4
    xs = np.cos(np.linspace(0, math.pi, 400))
    fit = np.polynomial.Chebyshev.fit(xs, appendix_poly_value(xs, constants, m), deg, domain=[-1, 1])
    extra = np.polynomial.Chebyshev.fit(xs, appendix_poly_value(xs, constants, m), deg + 2, domain=[-1, 1])
    power = fit.convert(kind=np.polynomial.Polynomial).coef
    tail = extra.convert(kind=np.polynomial.Polynomial).coef[deg + 1 :]
    return power[-1], np.max(np.abs(tail)) / np.max(np.abs(power))


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_polynomial_degree_and_leading_coefficient(m):
    for p, i in _configs(10, seed=m):
        consts = pair_config(p, i).constants()
        rep = appendix_polynomial(consts, m)
        lead, tail = _power_leading(consts, m)
        assert tail < 1e-9
        assert rep.degree_residual < 1e-9
        assert lead == pytest.approx(leading_coefficient_closed_form(consts, m), rel=1e-6)
        assert rep.leading_rel_err < 1e-8
        assert rep.positive
        assert all(-1 < r < 1 for r in rep.roots_in_range)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_engineered_point_is_a_root(m):
    hits = 0
    for p, i in _configs(10, seed=40 + m):
        q = engineered_eta_point(p, i, m)
        if q is None:
            continue
        hits += 1
        cfg = pair_config(q, i)
        consts = cfg.constants()
        c = math.cos(cfg.upsilon / 2)
        scale = max(abs(appendix_poly_value(x, consts, m)) for x in np.linspace(-1, 1, 41))
        assert abs(appendix_poly_value(c, consts, m)) < 1e-8 * scale
        assert any(abs(c - r) < 1e-5 for r in appendix_polynomial(consts, m).roots_in_range)
    assert hits > 0


def test_main_relation_rejects_coincident_vertices(point5):
    cfg = pair_config(point5, 2)
    cfg.Y1 = cfg.B_next
    with pytest.raises(DegenerateVertex):
        main_relation_residual(cfg)
