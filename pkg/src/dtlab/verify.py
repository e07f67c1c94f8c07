"""Identity battery run by `dtlab verify`.

Each check draws its own seeded sample and reports the worst residual against a tolerance.
A nonzero ``perturb`` injects a fault of that size into the quantity under test, so the
battery can prove it is able to fail.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .chain import (
    ChartPoint,
    beta_from_slacks,
    build_chain,
    chain_coords,
    gamma_distance,
    regime_excess,
)
from .dynamics.appendix import APPENDIX_EQUATIONS, identity_residuals, pair_config
from .dynamics.sampler import random_alpha, random_regular_point, task_rng
from .holonomy import Representation, b_word, evaluate, holonomy
from .hplane import IDENTITY, TWO_PI, angle_gap, dist, fixed_point, rotation, rotation_angle
from .mcg import conjugacy_equal, is_twist_fixed, twist_flow, twist_paircurve, twist_pants
from .trig import angle_from_sides, four_parts_residual, locos_angles, side_from_angles

CHECKS = ("trig", "holonomy", "moment_map", "round_trip", "twist_law", "pair_vs_pants", "fixed_points", "appendix")


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float
    count: int
    seconds: float
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "worst": self.worst, "tol": self.tol,
                "count": self.count, "seconds": self.seconds, "detail": self.detail}

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{flag} {self.name:<14} worst={self.worst:.3e} tol={self.tol:.1e} n={self.count}{extra}"


def _points(seed: int, count: int, sizes=(4, 5, 6, 7)):
    for t in range(count):
        n = sizes[t % len(sizes)]
        yield random_regular_point(n, task_rng(seed, t))


def _rep(p: ChartPoint, perturb: float = 0.0) -> Representation:
    chain = build_chain(p)
    rep = holonomy(chain, p.alpha, check=False)
    if perturb:
        gens = list(rep.gens)
        gens[0] = rotation(chain.c_vertex(1), p.alpha[0] + perturb)
        rep = Representation(tuple(gens), p.alpha)
    return rep


def check_trig(seed, count, perturb=0.0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        A, B, C = math.pi * rng.uniform(0.1, 0.95) * (0.1 / 3 + 0.9 * rng.dirichlet(np.ones(3)))
        t = locos_angles(A, B, C)
        c_back = angle_from_sides(t.a, t.b, t.c) + perturb
        worst = max(worst, abs(c_back - C), four_parts_residual(t),
                    abs(side_from_angles(A, B, C) - t.c) / max(1.0, t.c))
    return worst, 1e-9


def check_holonomy(seed, count, perturb=0.0):
    worst = 0.0
    for p in _points(seed, count):
        prod = _rep(p, perturb).product()
        worst = max(worst, prod.distance(IDENTITY))
    return worst, 1e-8


def check_moment_map(seed, count, perturb=0.0):
    worst = 0.0
    for p in _points(seed, count):
        chain = build_chain(p)
        rep = _rep(p, perturb)
        for k in range(1, p.n - 2):
            g = evaluate(rep, b_word(k, p.n))
            worst = max(worst, angle_gap(rotation_angle(g), p.beta[k - 1]), dist(fixed_point(g), chain.b_vertex(k)))
    return worst, 1e-8


def check_round_trip(seed, count, perturb=0.0):
    worst = 0.0
    for p in _points(seed, count):
        beta, gamma = chain_coords(build_chain(p), p.alpha)
        db = max(abs(x - y) for x, y in zip(beta, p.beta))
        worst = max(worst, db + perturb, gamma_distance(gamma, p.gamma))
    return worst, 1e-8


def check_twist_law(seed, count, perturb=0.0):
    worst = 0.0
    for idx, p in enumerate(_points(seed, count)):
        k = 1 + idx % (p.n - 3)
        moved = twist_flow(build_chain(p), k, p.beta[k - 1] + perturb)
        _, gamma = chain_coords(moved, p.alpha)
        want = twist_pants(p, k).gamma
        worst = max(worst, gamma_distance(gamma, want))
    return worst, 1e-8


def check_pair_vs_pants(seed, count, perturb=0.0):
    bad = 0
    for p in _points(seed, count, sizes=(4,)):
        rep = _rep(p)
        lhs = twist_paircurve(rep, 1, 2)
        q = twist_pants(p, 1)
        if perturb:
            q = q.with_gamma([q.gamma[0] + perturb])
        rhs = _rep(q)
        bad += not conjugacy_equal(lhs, rhs)
    return float(bad), 0.0


def stratified_fixed_point_sample(seed: int, per_n: int = 30, sizes=(4, 5, 6)):
    """Representations with random collapsed triangles and a random cyclic relabelling of punctures.

    Collapsing triangles produces the singular fibers on which some pair twists act trivially.
    """
    rng = np.random.default_rng(seed)
    out = []
    for n in sizes:
        for _ in range(per_n):
            collapse = int(rng.integers(0, 3))
            collapsed = set(rng.choice(n - 2, size=min(collapse, n - 3), replace=False).tolist()) if collapse else set()
            shift = int(rng.integers(0, n))
            alpha = random_alpha(n, rng)
            a2 = tuple(alpha[(k + shift) % n] for k in range(n))
            s = regime_excess(a2)
            live = [k for k in range(n - 2) if k not in collapsed]
            eps = np.zeros(n - 2)
            eps[live] = rng.dirichlet(np.ones(len(live))) * s
            p = ChartPoint(n, a2, beta_from_slacks(a2, eps), [float(g) for g in rng.uniform(0, TWO_PI, n - 3)])
            rep = holonomy(build_chain(p), a2)
            gens = tuple(rep.gens[(k - shift) % n] for k in range(n))
            out.append(Representation(gens, tuple(alpha)))
    return out


def check_fixed_points(seed, count, perturb=0.0):
    """Predicate vs explicit conjugacy test over every pair (i, j)."""
    per_n = max(1, count // 3)
    bad = total = fixed = 0
    for rep in stratified_fixed_point_sample(seed, per_n):
        for i, j in itertools.combinations(range(1, rep.n + 1), 2):
            pred = is_twist_fixed(rep, i, j)
            moved = twist_paircurve(rep, i, j)
            if perturb:
                g = list(moved.gens)
                g[0] = rotation(fixed_point(g[0]), rep.alpha[0] + perturb)
                moved = Representation(tuple(g), rep.alpha)
            bad += pred != conjugacy_equal(rep, moved)
            total += 1
            fixed += pred
    return float(bad), 0.0, f"{total} pairs, {fixed} fixed"


def check_appendix(seed, count, perturb=0.0):
    worst = 0.0
    for idx, p in enumerate(_points(seed, count, sizes=(5, 6, 7))):
        i = 2 + idx % (p.n - 3)
        cfg = pair_config(p, i)
        if perturb:
            cfg.Y1 = rotation(cfg.Cj, perturb).act(cfg.Y1)
        res = identity_residuals(cfg)
        worst = max(worst, *(res[k] for k in APPENDIX_EQUATIONS))
    return worst, 1e-9


_RUNNERS = {
    "trig": check_trig,
    "holonomy": check_holonomy,
    "moment_map": check_moment_map,
    "round_trip": check_round_trip,
    "twist_law": check_twist_law,
    "pair_vs_pants": check_pair_vs_pants,
    "fixed_points": check_fixed_points,
    "appendix": check_appendix,
}


def run_check(name: str, seed: int = 0, count: int = 200, perturb: float = 0.0) -> CheckResult:
    t0 = time.perf_counter()
    out = _RUNNERS[name](seed, count, perturb)
    worst, tol = out[0], out[1]
    detail = out[2] if len(out) > 2 else ""
    return CheckResult(name, bool(worst <= tol), float(worst), tol, count, time.perf_counter() - t0, detail)


def run_battery(seed: int = 0, count: int = 200, perturb: float = 0.0, only=None) -> list[CheckResult]:
    names = CHECKS if not only else [n for n in CHECKS if n in only]
    return [run_check(n, seed, count, perturb) for n in names]
