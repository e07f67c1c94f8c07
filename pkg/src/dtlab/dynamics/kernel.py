"""Compiled inner loop for random twist walks in the (beta, gamma) chart.

Each pair-curve step rebuilds the chain from the chart, forms the generators, applies the
twist automorphism and reads the chart back off the new generators.  Pants-curve steps are
applied directly in the chart.  The logic mirrors chain.build_chain, holonomy.holonomy,
mcg.twist_paircurve and holonomy.chain_from_rep/chain.chain_coords for regular points.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi
N_OBS = 10
SLACK_TOL = 1e-12


@njit(cache=True)
def _wrap(t):
    t = t - TWO_PI * math.floor(t / TWO_PI)
    if t >= TWO_PI:
        t -= TWO_PI
    return t


@njit(cache=True)
def _side(A, B, C):
    ch = (math.cos(A) * math.cos(B) + math.cos(C)) / (math.sin(A) * math.sin(B))
    if ch < 1.0 + 1e-15:
        ch = 1.0 + 1e-15
    return math.acosh(ch)


@njit(cache=True)
def _shoot(p, theta, d):
    h = 0.5 * (theta - 0.5 * math.pi)
    c, s = math.cos(h), math.sin(h)
    z = 1j * math.exp(d)
    w = (c * z + s) / (-s * z + c)
    return p.imag * w + p.real


@njit(cache=True)
def _direction(p, q):
    v = (q - p) / (q - p.conjugate())
    return _wrap(math.atan2(v.imag, v.real) + 0.5 * math.pi)


@njit(cache=True)
def _mul(x, y):
    out = np.empty(4)
    out[0] = x[0] * y[0] + x[1] * y[2]
    out[1] = x[0] * y[1] + x[1] * y[3]
    out[2] = x[2] * y[0] + x[3] * y[2]
    out[3] = x[2] * y[1] + x[3] * y[3]
    return out


@njit(cache=True)
def _inv(x):
    out = np.empty(4)
    out[0] = x[3]
    out[1] = -x[1]
    out[2] = -x[2]
    out[3] = x[0]
    return out


@njit(cache=True)
def _rotation(p, theta):
    y = p.imag
    x = p.real
    sy = math.sqrt(y)
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    h = np.array([sy, x / sy, 0.0, 1.0 / sy])
    r = np.array([c, s, -s, c])
    hi = np.array([1.0 / sy, -x / sy, 0.0, sy])
    return _mul(_mul(h, r), hi)


@njit(cache=True)
def _fixed_point(g):
    det = g[0] * g[3] - g[1] * g[2]
    sc = 1.0 / math.sqrt(det)
    a, c, d = g[0] * sc, g[2] * sc, g[3] * sc
    tr = a + d
    disc = 4.0 - tr * tr
    if disc <= 0.0 or c == 0.0:
        return complex(math.nan, math.nan)
    root = math.sqrt(disc)
    sgn = 1.0 if c > 0 else -1.0
    return complex((a - d) / (2.0 * c), sgn * root / (2.0 * c))


@njit(cache=True)
def _rotation_angle(g):
    det = g[0] * g[3] - g[1] * g[2]
    sc = 1.0 / math.sqrt(det)
    c, d = g[2] * sc, g[3] * sc
    p = _fixed_point(g)
    v = c * p + d
    return _wrap(-2.0 * math.atan2(v.imag, v.real))


@njit(cache=True)
def build_points(alpha, beta, gamma):
    """Exterior vertices C (n) and shared vertices B_0..B_{n-2} of a regular chain."""
    n = alpha.shape[0]
    fb = np.empty(n - 1)
    fb[0] = TWO_PI - alpha[0]
    for k in range(n - 3):
        fb[k + 1] = beta[k]
    fb[n - 2] = alpha[n - 1]
    C = np.empty(n, dtype=np.complex128)
    B = np.empty(n - 1, dtype=np.complex128)
    B[0] = 1j
    C[0] = 1j
    ref = 0.0
    for k in range(n - 2):
        at_b0 = 0.5 * fb[k]
        at_c = math.pi - 0.5 * alpha[k + 1]
        at_b1 = math.pi - 0.5 * fb[k + 1]
        bc = _side(at_b0, at_c, at_b1)
        bb = _side(at_b0, at_b1, at_c)
        if k == 0:
            to_next = 0.0
            to_apex = _wrap(at_b0)
        else:
            to_apex = _wrap(ref + gamma[k - 1])
            to_next = _wrap(to_apex - at_b0)
        apex = _shoot(B[k], to_apex, bc)
        nb = _shoot(B[k], to_next, bb)
        C[k + 1] = apex
        B[k + 1] = nb
        ref = _direction(nb, apex)
    C[n - 1] = B[n - 2]
    return C, B


@njit(cache=True)
def gens_from_chart(alpha, beta, gamma):
    n = alpha.shape[0]
    C, _ = build_points(alpha, beta, gamma)
    G = np.empty((n, 4))
    for k in range(n):
        G[k] = _rotation(C[k], alpha[k])
    return G


@njit(cache=True)
def chart_from_gens(G, beta_out, gamma_out):
    """Read (beta, gamma) off generators; returns False if the result is not a regular chain."""
    n = G.shape[0]
    C = np.empty(n, dtype=np.complex128)
    for k in range(n):
        C[k] = _fixed_point(G[k])
    B = np.empty(n - 1, dtype=np.complex128)
    B[0] = C[0]
    B[n - 2] = C[n - 1]
    P = G[0].copy()
    for k in range(1, n - 2):
        P = _mul(P, G[k])
        Bi = _inv(P)
        B[k] = _fixed_point(Bi)
        beta_out[k - 1] = _rotation_angle(Bi)
    for k in range(1, n - 2):
        a = C[k + 1]
        b = C[k]
        pb = B[k]
        if abs(a - pb) < 1e-12 or abs(b - pb) < 1e-12:
            return False
        gamma_out[k - 1] = _wrap(_direction(pb, a) - _direction(pb, b))
    for k in range(n - 3):
        if not math.isfinite(beta_out[k]) or not math.isfinite(gamma_out[k]):
            return False
    return True


@njit(cache=True)
def _pair_step(G, i, j, forward):
    ci = G[i - 1].copy()
    cj = G[j - 1].copy()
    X = _mul(ci, cj)
    Xi = _inv(X)
    Z = _mul(_mul(_mul(_inv(cj), _inv(ci)), cj), ci)
    if forward:
        outer = X
        outer_inv = Xi
        mid = _mul(_mul(X, _inv(Z)), Xi)
    else:
        outer = Xi
        outer_inv = X
        mid = Z
    mid_inv = _inv(mid)
    out = G.copy()
    out[i - 1] = _mul(_mul(outer, ci), outer_inv)
    out[j - 1] = _mul(_mul(outer, cj), outer_inv)
    for k in range(i + 1, j):
        out[k - 1] = _mul(_mul(mid, G[k - 1]), mid_inv)
    return out


@njit(cache=True)
def min_slack(alpha, beta):
    n = alpha.shape[0]
    prev = TWO_PI - alpha[0]
    worst = 1e300
    for k in range(n - 2):
        nxt = beta[k] if k < n - 3 else alpha[n - 1]
        e = alpha[k + 1] + nxt - prev - TWO_PI
        if e < worst:
            worst = e
        prev = nxt
    return worst


@njit(cache=True)
def apply_step(alpha, beta, gamma, kind, a, b, sign):
    """One twist step in place; returns False (state untouched) if it would leave the regular set."""
    if kind == 0:
        gamma[a - 1] = _wrap(gamma[a - 1] + sign * beta[a - 1])
        return True
    G = gens_from_chart(alpha, beta, gamma)
    G = _pair_step(G, a, b, sign > 0)
    nb = np.empty_like(beta)
    ng = np.empty_like(gamma)
    if not chart_from_gens(G, nb, ng):
        return False
    if min_slack(alpha, nb) <= SLACK_TOL:
        return False
    beta[:] = nb
    gamma[:] = ng
    return True


@njit(cache=True)
def observe(beta, gamma, lo1, width, out):
    t = (beta[0] - lo1) / width
    g = gamma[0]
    cg, sg = math.cos(g), math.sin(g)
    out[0] = cg
    out[1] = sg
    out[2] = math.cos(2.0 * g)
    out[3] = math.sin(2.0 * g)
    out[4] = t
    out[5] = t * t
    out[6] = t * cg
    out[7] = t * sg
    out[8] = math.cos(TWO_PI * t)
    out[9] = math.sin(math.pi * t)


@njit(cache=True)
def run_walk(alpha, beta, gamma, twists, uniforms, lo1, width):
    """Advance the walk over the given uniforms; returns (observable sums, rejected step count)."""
    sums = np.zeros(N_OBS)
    buf = np.empty(N_OBS)
    T = twists.shape[0]
    rejected = 0
    for u in uniforms:
        idx = int(math.floor(u * 2 * T))
        if idx >= 2 * T:
            idx = 2 * T - 1
        tw = idx // 2
        sign = 1 if idx % 2 == 0 else -1
        ok = apply_step(alpha, beta, gamma, twists[tw, 0], twists[tw, 1], twists[tw, 2], sign)
        if not ok:
            rejected += 1
        observe(beta, gamma, lo1, width, buf)
        for q in range(N_OBS):
            sums[q] += buf[q]
    return sums, rejected
