import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dtlab.chain import build_chain, chain_coords, gamma_distance
from dtlab.dynamics.sampler import random_regular_point
from dtlab.errors import NotClosed
from dtlab.holonomy import (
    CurveWord,
    Representation,
    angle_function,
    b_word,
    chain_from_rep,
    evaluate,
    holonomy,
    pair_word,
    restrict_subsphere,
)
from dtlab.hplane import IDENTITY, angle_gap, dist, fixed_point, rotation_angle

from conftest import regular_points

c = CurveWord.gen
letters = st.lists(st.integers(1, 6).flatmap(lambda i: st.sampled_from([i, -i])), max_size=12)


@given(letters)
def test_words_are_reduced(ls):
    w = CurveWord(ls)
    assert all(a != -b for a, b in zip(w.letters, w.letters[1:]))
    assert (w * w.inv()).letters == ()
    assert CurveWord.from_json(w.to_json()) == w


def test_word_basics():
    assert str(c(1) * c(2).inv()) == "c1c2^-1"
    assert str(CurveWord()) == "1"
    assert b_word(2, 6) == CurveWord([-3, -2, -1])
    assert b_word(4, 6) == c(6)
    assert pair_word(2, 4) == c(2) * c(4)
    w = (c(1) * c(2)).substitute({1: c(3) * c(1), 2: CurveWord()})
    assert w == c(3) * c(1)


@given(letters, st.integers(0, 5000))
def test_evaluate_homomorphism(ls, s):
    p = random_regular_point(6, s)
    rep = holonomy(build_chain(p), p.alpha)
    w = CurveWord(ls)
    assert evaluate(rep, CurveWord()) == IDENTITY
    assert (evaluate(rep, w) @ evaluate(rep, w.inv())).is_identity(1e-8)
    assert evaluate(rep, c(1) * c(2)).distance(rep.gens[0] @ rep.gens[1]) < 1e-14


def test_product_identity_and_moment_map():
    worst_prod = worst_beta = worst_b = 0.0
    for p in regular_points(1000):
        t = build_chain(p)
        rep = holonomy(t, p.alpha)
        worst_prod = max(worst_prod, rep.product().distance(IDENTITY))
        for k in range(1, p.n - 2):
            g = evaluate(rep, b_word(k, p.n))
            worst_beta = max(worst_beta, angle_gap(rotation_angle(g), p.beta[k - 1]))
            worst_b = max(worst_b, dist(fixed_point(g), t.b_vertex(k)))
    assert worst_prod < 1e-8 and worst_beta < 1e-8 and worst_b < 1e-8


@pytest.mark.parametrize("p", regular_points(8, sizes=(5, 6)), ids=lambda p: f"n{p.n}")
def test_angle_functions(p):
    rep = holonomy(build_chain(p), p.alpha)
    for i in range(1, p.n + 1):
        assert angle_gap(angle_function(rep, c(i)), p.alpha[i - 1]) < 1e-9
        assert dist(fixed_point(rep.gens[i - 1]), build_chain(p).c_vertex(i)) < 1e-9
    for k in range(1, p.n - 2):
        assert angle_gap(angle_function(rep, b_word(k, p.n)), p.beta[k - 1]) < 1e-9
    assert 0 < angle_function(rep, pair_word(2, 3)) < 2 * math.pi


def test_restrict_first_subsphere(point5):
    rep = holonomy(build_chain(point5), point5.alpha)
    sub = restrict_subsphere(rep, (c(1), c(2), c(3), b_word(2, 5)))
    want = point5.alpha[:3] + (point5.beta[1],)
    assert all(angle_gap(a, b) < 1e-9 for a, b in zip(sub.alpha, want))
    assert sub.product().is_identity(1e-8)


def test_restrict_second_subsphere():
    p = random_regular_point(6, 11)
    rep = holonomy(build_chain(p), p.alpha)
    d1 = (c(2) * c(3)).inv()
    sub = restrict_subsphere(rep, (c(1), d1.inv(), c(4), b_word(3, 6)))
    assert sub.n == 4
    assert angle_gap(sub.alpha[3], p.beta[2]) < 1e-9


def test_restrict_not_closed(point5):
    rep = holonomy(build_chain(point5), point5.alpha)
    with pytest.raises(NotClosed):
        restrict_subsphere(rep, (c(1), c(3), c(2), b_word(2, 5)))


@pytest.mark.parametrize("p", regular_points(12), ids=lambda p: f"n{p.n}")
def test_chain_from_rep_round_trip(p):
    rep = holonomy(build_chain(p), p.alpha)
    t = chain_from_rep(rep)
    beta, gamma = chain_coords(t, p.alpha)
    assert max(abs(a - b) for a, b in zip(beta, p.beta)) < 1e-8
    assert gamma_distance(gamma, p.gamma) < 1e-8


def test_conjugate_and_json(point5):
    rep = holonomy(build_chain(point5), point5.alpha)
    h = rep.gens[2]
    conj = rep.conjugate(h)
    assert conj.product().is_identity(1e-8)
    assert isinstance(rep.to_json()["gens"][0]["m"], list)
    assert Representation(conj.gens, conj.alpha).n == 5
