"""Triangle chains, the action-angle chart and the moment polytope.

Indexing: exterior vertices C[0..n-1] hold C_1..C_n, shared vertices B[0..n-4] hold
B_1..B_{n-3}.  Triangle k (k = 0..n-3) is (B_k, C_{k+2}, B_{k+1}) with B_0 = C_1 and
B_{n-2} = C_n.  Every non-degenerate triangle is traversed clockwise in that order and
has interior angles beta_k/2, pi - alpha_{k+2}/2, pi - beta_{k+1}/2, where
beta_0 = 2pi - alpha_1 and beta_{n-2} = alpha_n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateVertex, MalformedChain, PolytopeViolation, RegimeViolation
from .hplane import (
    TWO_PI,
    I_POINT,
    PlanePoint,
    angle_gap,
    direction,
    dist,
    oriented_angle,
    shoot,
    wrap,
)
from .trig import side_from_angles

FACET_TOL = 1e-12
MEASURE_TOL = 1e-7


@dataclass(frozen=True)
class ChartPoint:
    n: int
    alpha: tuple
    beta: tuple
    gamma: tuple  # entries may be None at junctions adjacent to collapsed triangles

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        object.__setattr__(self, "gamma", tuple(None if g is None else float(g) for g in self.gamma))
        if self.n < 4:
            raise ValueError("need at least four punctures")
        if len(self.alpha) != self.n or len(self.beta) != self.n - 3 or len(self.gamma) != self.n - 3:
            raise ValueError("coordinate vector lengths do not match n")

    def with_gamma(self, gamma) -> "ChartPoint":
        return ChartPoint(self.n, self.alpha, self.beta, tuple(gamma))

    def with_beta(self, beta) -> "ChartPoint":
        return ChartPoint(self.n, self.alpha, tuple(beta), self.gamma)

    @property
    def regular(self) -> bool:
        return all(g is not None for g in self.gamma)

    def to_json(self) -> dict:
        return {"n": self.n, "alpha": list(self.alpha), "beta": list(self.beta), "gamma": list(self.gamma)}

    @classmethod
    def from_json(cls, d: dict) -> "ChartPoint":
        return cls(int(d["n"]), d["alpha"], d["beta"], d["gamma"])


@dataclass(frozen=True)
class TriangleChain:
    C: tuple
    B: tuple
    degenerate: tuple

    @property
    def n(self) -> int:
        return len(self.C)

    def b_vertex(self, k: int) -> PlanePoint:
        """B_k with the boundary conventions B_0 = C_1, B_{n-2} = C_n."""
        if k == 0:
            return self.C[0]
        if k == self.n - 2:
            return self.C[-1]
        return self.B[k - 1]

    def c_vertex(self, i: int) -> PlanePoint:
        """C_i, 1-based."""
        return self.C[i - 1]

    def triangle(self, k: int):
        return (self.b_vertex(k), self.c_vertex(k + 2), self.b_vertex(k + 1))

    def to_json(self) -> dict:
        return {
            "C": [p.to_json() for p in self.C],
            "B": [p.to_json() for p in self.B],
            "degenerate": list(self.degenerate),
        }

    @classmethod
    def from_json(cls, d: dict) -> "TriangleChain":
        return cls(
            tuple(PlanePoint.from_json(p) for p in d["C"]),
            tuple(PlanePoint.from_json(p) for p in d["B"]),
            tuple(bool(x) for x in d["degenerate"]),
        )


def check_regime(alpha: Sequence[float]) -> None:
    n = len(alpha)
    if n < 4:
        raise RegimeViolation("need at least four punctures")
    if any(not (0.0 < a < TWO_PI) for a in alpha):
        raise RegimeViolation("peripheral angles must lie in (0, 2pi)")
    if sum(alpha) <= TWO_PI * (n - 1):
        raise RegimeViolation(f"sum of angles {sum(alpha):.12g} must exceed 2pi(n-1) = {TWO_PI * (n - 1):.12g}")


def full_beta(alpha: Sequence[float], beta: Sequence[float]) -> list:
    """beta_0 .. beta_{n-2} including the two boundary conventions."""
    return [TWO_PI - alpha[0], *beta, alpha[-1]]


def slacks(alpha: Sequence[float], beta: Sequence[float]) -> np.ndarray:
    """eps_k = alpha_{k+2} + beta_{k+1} - beta_k - 2pi for k = 0..n-3; they sum to the regime excess."""
    fb = full_beta(alpha, beta)
    n = len(alpha)
    return np.array([alpha[k + 1] + fb[k + 1] - fb[k] - TWO_PI for k in range(n - 2)])


def regime_excess(alpha: Sequence[float]) -> float:
    return float(sum(alpha) - TWO_PI * (len(alpha) - 1))


def polytope_contains(alpha, beta, strict: bool = True) -> bool:
    check_regime(alpha)
    if len(beta) != len(alpha) - 3:
        raise ValueError("beta must have n-3 entries")
    # same tolerance band as facet_flags: strict membership means no triangle collapses
    eps = slacks(alpha, beta)
    return bool(np.all(eps > FACET_TOL)) if strict else bool(np.all(eps >= -FACET_TOL))


def polytope_box(alpha) -> tuple[np.ndarray, np.ndarray]:
    """Axis-aligned bounding box of the moment polytope; every side has length equal to the regime excess."""
    check_regime(alpha)
    n = len(alpha)
    s = regime_excess(alpha)
    lo = np.empty(n - 3)
    cur = 2.0 * TWO_PI - alpha[0] - alpha[1]
    for k in range(n - 3):
        lo[k] = cur
        cur += TWO_PI - alpha[k + 2]
    return lo, lo + s


def polytope_vertices(alpha) -> np.ndarray:
    """The n-2 vertices of the simplex: all of the excess placed in one slack."""
    check_regime(alpha)
    n = len(alpha)
    s = regime_excess(alpha)
    lo, _ = polytope_box(alpha)
    verts = []
    for j in range(n - 2):
        eps = np.zeros(n - 2)
        eps[j] = s
        verts.append(lo + np.cumsum(eps[: n - 3]))
    return np.array(verts)


def beta_from_slacks(alpha, eps) -> np.ndarray:
    lo, _ = polytope_box(alpha)
    return lo + np.cumsum(np.asarray(eps, dtype=float)[: len(alpha) - 3])


def facet_flags(alpha, beta, tol: float = FACET_TOL) -> list:
    """Per-triangle collapse flags; raises PolytopeViolation outside the closed polytope."""
    eps = slacks(alpha, beta)
    if np.any(eps < -tol):
        k = int(np.argmin(eps))
        raise PolytopeViolation(f"triangle {k} would need angle sum above pi (slack {eps[k]:.3g})")
    return [bool(e <= tol) for e in eps]


def gamma_slots(degenerate: Sequence[bool]) -> list:
    """For each junction j = 1..n-3, the index of the next non-degenerate triangle b >= j
    when triangle j-1 is non-degenerate and such b exists, else None."""
    m = len(degenerate)
    out = []
    for j in range(1, m):
        if degenerate[j - 1]:
            out.append(None)
            continue
        nxt = next((b for b in range(j, m) if not degenerate[b]), None)
        out.append(nxt)
    return out


def _triangle_sides(beta_k: float, alpha_apex: float, beta_k1: float) -> tuple[float, float]:
    """Lengths B_k C_{k+2} and B_k B_{k+1} of a non-degenerate chain triangle."""
    at_b0 = 0.5 * beta_k
    at_c = math.pi - 0.5 * alpha_apex
    at_b1 = math.pi - 0.5 * beta_k1
    bc = side_from_angles(at_b0, at_c, at_b1)
    bb = side_from_angles(at_b0, at_b1, at_c)
    return bc, bb


def build_chain(p: ChartPoint) -> TriangleChain:
    alpha = p.alpha
    n = p.n
    check_regime(alpha)
    degenerate = facet_flags(alpha, p.beta)
    fb = full_beta(alpha, p.beta)
    live = [k for k in range(n - 2) if not degenerate[k]]
    if not live:
        raise PolytopeViolation("every triangle collapsed")

    bpts: list = [None] * (n - 1)  # B_0 .. B_{n-2}
    cpts: list = [None] * n

    first = live[0]
    bpts[first] = I_POINT
    ref = None  # direction at the current B vertex toward the previous apex
    for idx, k in enumerate(live):
        base = bpts[k]
        if idx == 0:
            to_next_b = 0.0
            to_apex = wrap(0.5 * fb[k])
        else:
            prev = live[idx - 1]
            g = p.gamma[prev]  # junction prev+1 lives at gamma index prev
            if g is None:
                raise PolytopeViolation(f"missing angle coordinate at junction {prev + 1}")
            to_apex = wrap(ref + g)
            to_next_b = wrap(to_apex - 0.5 * fb[k])
        bc, bb = _triangle_sides(fb[k], alpha[k + 1], fb[k + 1])
        apex = shoot(base, to_apex, bc)
        nb = shoot(base, to_next_b, bb)
        cpts[k + 1] = apex
        # everything collapsed between this triangle and the next live one sits at nb
        nxt = live[idx + 1] if idx + 1 < len(live) else n - 2
        for j in range(k + 1, nxt + 1):
            bpts[j] = nb
        for j in range(k + 1, nxt):
            cpts[j + 1] = nb
        ref = wrap(direction(nb, apex))
        if idx + 1 == len(live):
            for j in range(k + 1, n - 1):
                bpts[j] = nb
            for j in range(k + 2, n):
                cpts[j] = nb

    # collapsed run before the first live triangle
    for j in range(0, first):
        bpts[j] = bpts[first]
        cpts[j + 1] = bpts[first]
    cpts[0] = bpts[0]
    cpts[n - 1] = bpts[n - 2]
    return TriangleChain(tuple(cpts), tuple(bpts[1 : n - 2]), tuple(degenerate))


def chain_coords(t: TriangleChain, alpha) -> tuple[tuple, tuple]:
    """Recover (beta, gamma) from a realized chain; gamma entries are None where undefined."""
    n = t.n
    if len(alpha) != n:
        raise MalformedChain("alpha length does not match chain")
    m = n - 2
    deg = list(t.degenerate)
    beta = [None] * (n - 1)
    beta[0] = TWO_PI - alpha[0]
    beta[n - 2] = alpha[-1]
    try:
        for k in range(m):
            if deg[k]:
                continue
            bk, ck, bk1 = t.triangle(k)
            at_b0 = oriented_angle(ck, bk, bk1)
            at_b1 = oriented_angle(bk, bk1, ck)
            at_c = oriented_angle(bk1, ck, bk)
            # clockwise triangles give all three oriented angles in (0, pi)
            if max(at_b0, at_b1, at_c) >= math.pi:
                raise MalformedChain(f"triangle {k} is not clockwise")
            if abs(at_c - (math.pi - 0.5 * alpha[k + 1])) > MEASURE_TOL:
                raise MalformedChain(f"apex angle of triangle {k} inconsistent with alpha")
            for idx, val in ((k, 2.0 * at_b0), (k + 1, TWO_PI - 2.0 * at_b1)):
                if beta[idx] is None:
                    beta[idx] = val
                elif abs(beta[idx] - val) > 2 * MEASURE_TOL:
                    raise MalformedChain(f"inconsistent action at B_{idx}")
    except DegenerateVertex as exc:
        raise MalformedChain(f"non-degenerate triangle has coincident vertices: {exc}") from None
    for k in range(m):
        if deg[k]:
            bk, ck, bk1 = t.triangle(k)
            if dist(bk, ck) > 1e-7 or dist(bk, bk1) > 1e-7:
                raise MalformedChain(f"collapsed triangle {k} has distinct vertices")
            val = None if beta[k] is None else beta[k] + TWO_PI - alpha[k + 1]
            if beta[k + 1] is None:
                beta[k + 1] = val
            elif val is not None and abs(beta[k + 1] - val) > 2 * MEASURE_TOL:
                raise MalformedChain(f"inconsistent action across collapsed triangle {k}")
    # propagate backwards through leading collapsed runs when needed
    for k in range(m - 1, -1, -1):
        if deg[k] and beta[k] is None and beta[k + 1] is not None:
            beta[k] = beta[k + 1] - TWO_PI + alpha[k + 1]
    if any(b is None for b in beta):
        raise MalformedChain("could not recover every action")

    gamma = []
    for j, nxt in enumerate(gamma_slots(deg), start=1):
        if nxt is None:
            gamma.append(None)
            continue
        gamma.append(oriented_angle(t.c_vertex(nxt + 2), t.b_vertex(j), t.c_vertex(j + 1)))
    return tuple(beta[1 : n - 2]), tuple(gamma)


def is_regular(t: TriangleChain) -> bool:
    return not any(t.degenerate)


def chain_distance(t1: TriangleChain, t2: TriangleChain) -> float:
    """Max vertex displacement between two chains in the same anchoring."""
    pts1 = list(t1.C) + list(t1.B)
    pts2 = list(t2.C) + list(t2.B)
    return max(dist(a, b) for a, b in zip(pts1, pts2))


def gamma_distance(g1, g2) -> float:
    worst = 0.0
    for a, b in zip(g1, g2):
        if (a is None) != (b is None):
            return math.inf
        if a is not None:
            worst = max(worst, angle_gap(a, b))
    return worst
