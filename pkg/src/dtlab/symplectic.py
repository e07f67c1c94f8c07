"""Twist-flow derivatives as Poisson-bracket proxies and the transverse pants construction."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .chain import ChartPoint, TriangleChain, build_chain, chain_coords, is_regular
from .errors import BothDegenerate, NumericallyUnstable, RegularityLost
from .holonomy import (
    CurveWord,
    Representation,
    angle_function,
    b_word,
    chain_from_rep,
    evaluate,
    holonomy,
    restrict_subsphere,
)
from .hplane import dist, fixed_point, wrap, wrap_signed
from .mcg import twist_flow

DEFAULT_STEP = 1e-4
RICHARDSON_REL = 0.05
RICHARDSON_ABS = 1e-7
NONZERO_TOL = 1e-8
SEPARATION_TOL = 1e-7

Observable = Callable[[Representation], float]


@dataclass(frozen=True)
class BracketEstimate:
    value: float
    stepsize: float
    residual: float

    def is_zero(self, tol: float = NONZERO_TOL) -> bool:
        return abs(self.value) < tol


@dataclass(frozen=True)
class PantsFamily:
    curves: tuple
    chained: bool = True
    kinds: tuple = ()  # "A" for the (w2 w3)^-1 candidate, "B" for (w1 w3)^-1

    def to_json(self) -> dict:
        return {"curves": [w.to_json() for w in self.curves], "chained": self.chained, "kinds": list(self.kinds)}


def standard_family(n: int) -> PantsFamily:
    return PantsFamily(tuple(b_word(k, n) for k in range(1, n - 2)), True)


def angle_observable(w: CurveWord) -> Observable:
    return lambda rep: angle_function(rep, w)


def beta_observable(k: int) -> Observable:
    return lambda rep: angle_function(rep, b_word(k, rep.n))


def gamma_observable(k: int) -> Observable:
    def f(rep: Representation) -> float:
        _, gamma = chain_coords(chain_from_rep(rep), rep.alpha)
        return gamma[k - 1]

    return f


def _flowed_reps(t: TriangleChain, alpha, k: int, h: float):
    times = (h, -h, 0.5 * h, -0.5 * h)
    return [holonomy(twist_flow(t, k, s), alpha, check=False) for s in times]


def _estimate(vals, h: float, check: bool) -> BracketEstimate:
    fp, fm, fp2, fm2 = vals
    # observables are angles; wrap the differences so a crossing of 0 = 2pi is harmless
    d1 = wrap_signed(fp - fm) / (2.0 * h)
    d2 = wrap_signed(fp2 - fm2) / h
    value = (4.0 * d2 - d1) / 3.0
    residual = abs(d1 - d2)
    if check and residual > max(RICHARDSON_REL * abs(value), RICHARDSON_ABS):
        raise NumericallyUnstable(f"Richardson gap {residual:.3g} too large for value {value:.3g}")
    return BracketEstimate(value, h, residual)


def d_gamma_chain(t: TriangleChain, alpha, f: Observable, k: int, h: float = DEFAULT_STEP, check: bool = True) -> BracketEstimate:
    reps = _flowed_reps(t, alpha, k, h)
    return _estimate([f(r) for r in reps], h, check)


def d_gamma(p: ChartPoint, f: Observable, k: int, h: float = DEFAULT_STEP, check: bool = True) -> BracketEstimate:
    """Derivative of f along the twist flow about B_k (proportional to the bracket of beta_k with f)."""
    return d_gamma_chain(build_chain(p), p.alpha, f, k, h, check)


def bracket_matrix(p: ChartPoint, observables: Sequence[Observable], h: float = DEFAULT_STEP, check: bool = True):
    """M[i][j] = derivative of observable j along the flow about B_{i+1}; also the Richardson gaps."""
    t = build_chain(p)
    m = p.n - 3
    M = np.zeros((m, len(observables)))
    R = np.zeros_like(M)
    for i in range(m):
        reps = _flowed_reps(t, p.alpha, i + 1, h)
        for j, f in enumerate(observables):
            est = _estimate([f(r) for r in reps], h, check)
            M[i, j], R[i, j] = est.value, est.residual
    return M, R


def candidate_words(w: Sequence[CurveWord]) -> tuple[CurveWord, CurveWord]:
    """The two candidate curves of a four-holed sphere with peripheral words w1..w4."""
    return (w[1] * w[2]).inv(), (w[0] * w[2]).inv()


def _select(rep4: Representation, h: float = DEFAULT_STEP, tol: float = NONZERO_TOL):
    chain4 = chain_from_rep(rep4)
    ests = []
    for cand in candidate_words([CurveWord.gen(i) for i in range(1, 5)]):
        ests.append(d_gamma_chain(chain4, rep4.alpha, angle_observable(cand), 1, h))
    a, b = ests
    if abs(a.value) < tol and abs(b.value) < tol:
        raise BothDegenerate(f"both candidate brackets vanish ({a.value:.3g}, {b.value:.3g})")
    kind = "A" if abs(a.value) >= abs(b.value) else "B"
    return kind, ests


def select_d_n4(rep4: Representation, h: float = DEFAULT_STEP, tol: float = NONZERO_TOL) -> CurveWord:
    """Pick (c2 c3)^-1 or (c1 c3)^-1, whichever moves more under the flow about B_1."""
    if rep4.n != 4:
        raise ValueError("selector works on four-punctured spheres")
    kind, _ = _select(rep4, h, tol)
    gens = [CurveWord.gen(i) for i in range(1, 5)]
    return candidate_words(gens)[0 if kind == "A" else 1]


@dataclass
class TransverseStep:
    words: tuple
    kind: str
    estimates: tuple
    separation: float


def construct_transverse(p: ChartPoint, h: float = DEFAULT_STEP, tol: float = NONZERO_TOL, sep_tol: float = SEPARATION_TOL, trace: list | None = None) -> PantsFamily:
    """Iteratively build the transverse chained decomposition d_1..d_{n-3}."""
    n = p.n
    rep = holonomy(build_chain(p), p.alpha)
    c = [None] + [CurveWord.gen(i) for i in range(1, n + 1)]
    x = c[1]
    prev = c[2]  # d_0^-1 plays the role of c_2 on the first sub-sphere
    curves, kinds = [], []
    for i in range(1, n - 2):
        words = (x, prev, c[i + 2], b_word(i + 1, n))
        rep4 = restrict_subsphere(rep, words)
        # the second exterior vertex is D_{i-1} (C_2 on the first step), the shared one B_i
        d_prev = fixed_point(rep4.gens[1])
        b_i = fixed_point(evaluate(rep, b_word(i, n)))
        sep = dist(d_prev, b_i)
        if sep < sep_tol:
            raise RegularityLost(f"step {i}: D_{i - 1} coincides with B_{i} (separation {sep:.3g})")
        if not is_regular(chain_from_rep(rep4)):
            raise RegularityLost(f"step {i}: restricted chain is singular")
        kind, ests = _select(rep4, h, tol)
        da, db = candidate_words(words)
        d = da if kind == "A" else db
        curves.append(d)
        kinds.append(kind)
        if trace is not None:
            trace.append(TransverseStep(words, kind, tuple(ests), sep))
        x = words[0] if kind == "A" else words[0] * words[1] * words[0].inv()
        prev = d.inv()
    return PantsFamily(tuple(curves), True, tuple(kinds))


@dataclass
class Certificate:
    point: ChartPoint
    family: PantsFamily
    matrix: np.ndarray
    residuals: np.ndarray
    rank: int
    singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def off_pattern(self) -> float:
        """Largest |M[i][j]| with i > j relative to the matrix norm."""
        M = self.matrix
        low = np.tril(M, -1)
        norm = np.linalg.norm(M)
        return float(np.max(np.abs(low)) / norm) if norm > 0 else 0.0

    def to_json(self) -> dict:
        return {
            "point": self.point.to_json(),
            "curves": [w.to_json() for w in self.family.curves],
            "matrix": self.matrix.tolist(),
            "rank": self.rank,
        }


def numerical_rank(M: np.ndarray, rel: float = 1e-6, abs_tol: float = NONZERO_TOL) -> tuple[int, np.ndarray]:
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] < abs_tol:
        return 0, s
    return int(np.sum(s > max(rel * s[0], abs_tol))), s


def transversality_certificate(p: ChartPoint, D: PantsFamily, h: float = DEFAULT_STEP) -> tuple[int, np.ndarray]:
    cert = certify(p, D, h)
    return cert.rank, cert.matrix


def certify(p: ChartPoint, D: PantsFamily, h: float = DEFAULT_STEP) -> Certificate:
    obs = [angle_observable(w) for w in D.curves]
    M, R = bracket_matrix(p, obs, h)
    rank, s = numerical_rank(M)
    return Certificate(p, D, M, R, rank, s)


def chart_jacobian(p: ChartPoint, observables: Sequence[Observable], h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of the observables in the (beta, gamma) chart, by rebuilding chains."""
    m = p.n - 3
    coords = np.array(list(p.beta) + list(p.gamma), dtype=float)
    J = np.zeros((len(observables), 2 * m))
    for col in range(2 * m):
        vals = []
        for s in (h, -h):
            q = coords.copy()
            q[col] += s
            pt = ChartPoint(p.n, p.alpha, q[:m], [wrap(g) for g in q[m:]])
            rep = holonomy(build_chain(pt), p.alpha, check=False)
            vals.append([f(rep) for f in observables])
        J[:, col] = [wrap_signed(a - b) / (2 * h) for a, b in zip(*vals)]
    return J
