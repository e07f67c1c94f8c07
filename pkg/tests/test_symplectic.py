import math

import numpy as np
import pytest

from dtlab.chain import build_chain
from dtlab.dynamics.sampler import random_regular_point, task_rng
from dtlab.errors import BothDegenerate, NumericallyUnstable, RegularityLost
from dtlab.holonomy import CurveWord, holonomy
from dtlab.symplectic import (
    PantsFamily,
    TransverseStep,
    angle_observable,
    beta_observable,
    bracket_matrix,
    candidate_words,
    certify,
    chart_jacobian,
    construct_transverse,
    d_gamma,
    gamma_observable,
    numerical_rank,
    select_d_n4,
    standard_family,
    transversality_certificate,
)

from conftest import regular_points

c = CurveWord.gen


def test_actions_commute(point5):
    for k in (1, 2):
        for m in (1, 2):
            assert d_gamma(point5, beta_observable(m), k).is_zero()


def test_angle_coordinate_derivative_is_one(point5):
    for k in (1, 2):
        est = d_gamma(point5, gamma_observable(k), k)
        assert est.value == pytest.approx(1.0, abs=1e-7)
        other = d_gamma(point5, gamma_observable(3 - k), k)
        assert abs(other.value) < 1e-7


def test_disjoint_curve_has_zero_bracket():
    # (c2 c3)^-1 sits inside the first two pairs of pants of the n = 6 chain, away from b_3
    p = random_regular_point(6, 3)
    assert d_gamma(p, angle_observable((c(2) * c(3)).inv()), 3).is_zero()
    assert d_gamma(p, angle_observable((c(2) * c(3)).inv()), 2).is_zero()


@pytest.mark.parametrize("p", regular_points(6, sizes=(4, 5, 6)), ids=lambda p: f"n{p.n}")
def test_flow_derivative_matches_chart_jacobian(p):
    # the flow about B_k moves gamma_k alone, so its derivative is the gamma_k partial in the chart
    words = [(c(2) * c(3)).inv(), (c(1) * c(3)).inv()]
    obs = [angle_observable(w) for w in words]
    J = chart_jacobian(p, obs)
    m = p.n - 3
    for k in range(1, m + 1):
        for j, f in enumerate(obs):
            est = d_gamma(p, f, k, check=False)
            assert est.value == pytest.approx(J[j, m + k - 1], abs=1e-6, rel=1e-5)


def test_unstable_estimate_raises(point5):
    with pytest.raises(NumericallyUnstable):
        d_gamma(point5, angle_observable(c(1) * c(3)), 1, h=2.0)


def test_candidate_words():
    w = [c(1), c(2), c(3), c(4)]
    a, b = candidate_words(w)
    assert a == (c(2) * c(3)).inv() and b == (c(1) * c(3)).inv()


def _n4_at(gamma, seed=21):
    p = random_regular_point(4, task_rng(seed, 0))
    return p.with_gamma([gamma])


def test_selector_avoids_the_c2c3_zero():
    p = _n4_at(math.pi)
    rep = holonomy(build_chain(p), p.alpha)
    assert d_gamma(p, angle_observable((c(2) * c(3)).inv()), 1, check=False).is_zero(1e-9)
    assert select_d_n4(rep) == (c(1) * c(3)).inv()


def test_selector_avoids_the_c1c3_zero():
    base = _n4_at(1.0)
    p = base.with_gamma([2 * math.pi - base.beta[0] / 2])
    rep = holonomy(build_chain(p), p.alpha)
    assert d_gamma(p, angle_observable((c(1) * c(3)).inv()), 1, check=False).is_zero(1e-9)
    assert select_d_n4(rep) == (c(2) * c(3)).inv()


def test_selector_picks_larger_bracket():
    p = _n4_at(1.234)
    rep = holonomy(build_chain(p), p.alpha)
    ests = [abs(d_gamma(p, angle_observable(w), 1).value) for w in candidate_words([c(1), c(2), c(3), c(4)])]
    assert min(ests) > 1e-6
    chosen = select_d_n4(rep)
    assert chosen == candidate_words([c(1), c(2), c(3), c(4)])[int(np.argmax(ests))]


def test_selector_errors():
    p = _n4_at(1.0)
    rep = holonomy(build_chain(p), p.alpha)
    with pytest.raises(BothDegenerate):
        select_d_n4(rep, tol=1e6)
    with pytest.raises(ValueError):
        select_d_n4(holonomy(build_chain(random_regular_point(5, 1)), random_regular_point(5, 1).alpha))


def test_n4_family_is_single_selected_curve():
    p = _n4_at(2.0)
    fam = construct_transverse(p)
    assert len(fam.curves) == 1 and fam.chained
    assert fam.curves[0] == select_d_n4(holonomy(build_chain(p), p.alpha))


def test_n5_case_table():
    seen = set()
    for s in range(40):
        p = random_regular_point(5, task_rng(99, s))
        trace = []
        fam = construct_transverse(p, trace=trace)
        d1, d2 = fam.curves
        assert all(isinstance(t, TransverseStep) for t in trace)
        if d1 == (c(2) * c(3)).inv():
            assert d2 in {CurveWord([2, 3, 4]).inv(), (c(1) * c(4)).inv()}
        else:
            assert d1 == (c(1) * c(3)).inv()
            assert d2 in {CurveWord([1, 3, 4]).inv(), CurveWord([1, 2, -1, 4]).inv()}
        seen.add(fam.kinds)
    assert len(seen) >= 3


def test_regularity_lost_on_tight_separation(point5):
    with pytest.raises(RegularityLost):
        construct_transverse(point5, sep_tol=1e3)


@pytest.mark.parametrize("p", regular_points(12, sizes=(4, 5, 6, 7)), ids=lambda p: f"n{p.n}")
def test_certificate_is_triangular_and_full_rank(p):
    fam = construct_transverse(p)
    rank, M = transversality_certificate(p, fam)
    assert rank == p.n - 3
    assert np.max(np.abs(np.tril(M, -1)), initial=0.0) < 1e-6 * np.linalg.norm(M)
    # the Jacobian of the new angle functions in the chart has the same gamma block
    J = chart_jacobian(p, [angle_observable(w) for w in fam.curves])
    m = p.n - 3
    assert np.allclose(J[:, m:].T, M, atol=1e-6)


def test_standard_family_has_rank_zero(point5):
    rank, M = transversality_certificate(point5, standard_family(5))
    assert rank == 0 and np.max(np.abs(M)) < 1e-8


def test_numerical_rank():
    assert numerical_rank(np.diag([1.0, 1e-9]))[0] == 1
    assert numerical_rank(np.zeros((2, 2)))[0] == 0


def test_certificate_json(point5):
    cert = certify(point5, construct_transverse(point5))
    d = cert.to_json()
    assert d["rank"] == 2 and len(d["matrix"]) == 2
    assert PantsFamily(cert.family.curves).to_json()["chained"]


def test_bracket_matrix_shape(point5):
    M, R = bracket_matrix(point5, [beta_observable(1), gamma_observable(1), gamma_observable(2)])
    assert M.shape == (2, 3) and np.all(R >= 0)
    assert np.allclose(M[:, 1:], np.eye(2), atol=1e-7)
