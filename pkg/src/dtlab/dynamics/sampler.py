"""Lebesgue sampling in the action-angle chart and polytope volume oracles."""
from __future__ import annotations

import math

import numpy as np
from scipy.stats import qmc

from ..chain import ChartPoint, check_regime, polytope_box, regime_excess, slacks

TWO_PI = 2.0 * math.pi


def as_generator(rng_seed) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(rng_seed)


def task_rng(master_seed: int, task_id: int) -> np.random.Generator:
    """Independent stream for one task of a parallel batch."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(task_id,)))


def _inside(alpha, lo, s, beta: np.ndarray) -> np.ndarray:
    """Strict polytope membership for a batch of beta rows."""
    n = len(alpha)
    prev = np.full(beta.shape[0], TWO_PI - alpha[0])
    ok = np.ones(beta.shape[0], dtype=bool)
    for k in range(n - 2):
        nxt = beta[:, k] if k < n - 3 else np.full(beta.shape[0], alpha[-1])
        ok &= alpha[k + 1] + nxt - prev - TWO_PI > 0.0
        prev = nxt
    return ok


def goldman_batch(alpha, count: int, rng_seed=None):
    """count chart samples; returns (beta rows, gamma rows, acceptance rate)."""
    check_regime(alpha)
    rng = as_generator(rng_seed)
    n = len(alpha)
    m = n - 3
    lo, hi = polytope_box(alpha)
    s = regime_excess(alpha)
    out = np.empty((count, m))
    filled = drawn = accepted = 0
    while filled < count:
        want = max(64, int(1.2 * (count - filled) * math.factorial(m)) + 16)
        cand = lo + s * rng.random((want, m))
        drawn += want
        keep = cand[_inside(alpha, lo, s, cand)]
        accepted += keep.shape[0]
        take = min(keep.shape[0], count - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    gamma = TWO_PI * rng.random((count, m))
    return out, gamma, accepted / drawn if drawn else 1.0


def goldman_sample(alpha, rng_seed=None) -> ChartPoint:
    """One chart point: beta uniform on the moment polytope, gamma uniform on the torus."""
    check_regime(alpha)
    rng = as_generator(rng_seed)
    n = len(alpha)
    lo, _ = polytope_box(alpha)
    s = regime_excess(alpha)
    while True:
        beta = lo + s * rng.random(n - 3)
        if np.all(slacks(alpha, beta) > 0):
            break
    gamma = TWO_PI * rng.random(n - 3)
    return ChartPoint(n, alpha, beta, gamma)


def acceptance_rate(alpha, count: int = 200_000, rng_seed=None) -> float:
    """Empirical rejection acceptance: draws inside the polytope over draws in the box."""
    check_regime(alpha)
    rng = as_generator(rng_seed)
    lo, _ = polytope_box(alpha)
    s = regime_excess(alpha)
    cand = lo + s * rng.random((count, len(alpha) - 3))
    return float(np.mean(_inside(alpha, lo, s, cand)))


def polytope_volume_qmc(alpha, m_log2: int = 16, seed: int = 0) -> float:
    """Volume fraction of the polytope in its bounding box from a scrambled Sobol rule."""
    check_regime(alpha)
    d = len(alpha) - 3
    lo, _ = polytope_box(alpha)
    s = regime_excess(alpha)
    pts = qmc.Sobol(d, scramble=True, seed=seed).random_base2(m_log2)
    return float(np.mean(_inside(alpha, lo, s, lo + s * pts)))


def random_alpha(n: int, rng_seed=None, spread=(0.3, 0.9), floor: float = 0.5) -> tuple:
    """Peripheral angles in the regime sum(alpha) > 2pi(n-1), with a controlled excess.

    The deficits 2pi - alpha_i split 2pi q among the punctures; a fraction ``floor`` is shared
    equally so that no cone angle gets arbitrarily close to 2pi, where chains run off to the
    ideal boundary and lose precision.
    """
    rng = as_generator(rng_seed)
    q = rng.uniform(*spread)
    w = (1.0 - floor) * rng.dirichlet(np.ones(n)) + floor / n
    return tuple(float(TWO_PI - TWO_PI * q * wi) for wi in w)


def random_regular_point(n: int, rng_seed=None, alpha=None, margin: float = 0.02) -> ChartPoint:
    """A regular chart point with every slack at least margin times the excess."""
    rng = as_generator(rng_seed)
    if alpha is None:
        alpha = random_alpha(n, rng)
    s = regime_excess(alpha)
    k = n - 2
    eps = margin * s + (1.0 - k * margin) * s * rng.dirichlet(np.ones(k))
    lo, _ = polytope_box(alpha)
    beta = lo + np.cumsum(eps[: n - 3])
    gamma = TWO_PI * rng.random(n - 3)
    return ChartPoint(n, alpha, beta, gamma)
