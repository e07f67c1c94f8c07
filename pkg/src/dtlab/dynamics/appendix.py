"""The quadrilateral C_i, C_j, B_{j-1}, Y_1 and the trigonometric identities it satisfies.

The configuration uses a pair of consecutive punctures j = i + 1 with 2 <= i <= n - 2, so that
B_{i-1} = B_{j-2} is a shared vertex and the angle coordinate at B_{i-1} is gamma_{i-1}.
Y_1 is the fixed point of rho(c_i c_j).  The vertex angle at Y_1 of the triangle
(C_i, C_j, Y_1) is pi - u/2 where u = 2pi - (rotation angle of rho(c_i c_j)), i.e. u is the
rotation angle of rho((c_i c_j)^-1); the polynomial variable is cos(u/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..chain import ChartPoint, build_chain
from ..errors import DegenerateVertex
from ..hplane import (
    I_POINT,
    TWO_PI,
    dist,
    fixed_point,
    interior_angle,
    oriented_angle,
    rotation,
    rotation_angle,
    translate_to,
)
from ..trig import TriangleData, cheb_cos, forward_difference


@dataclass
class PairConfig:
    i: int
    j: int
    alpha_i: float
    alpha_j: float
    Ci: object
    Cj: object
    B_prev: object  # B_{i-1} = B_{j-2}
    B_next: object  # B_{j-1}
    Y1: object
    rot_pair: float  # rotation angle of rho(c_i c_j)
    gamma: float  # angle coordinate at B_{i-1}

    @property
    def upsilon(self) -> float:
        """Rotation angle of rho((c_i c_j)^-1): the Y_1 vertex angle is pi minus half of it."""
        return TWO_PI - self.rot_pair

    @property
    def d1(self):
        return dist(self.Ci, self.B_prev)

    @property
    def d2(self):
        return dist(self.Cj, self.B_prev)

    @property
    def d3(self):
        return dist(self.Cj, self.B_next)

    @property
    def dCC(self):
        return dist(self.Ci, self.Cj)

    @property
    def dYC(self):
        return dist(self.Y1, self.Cj)

    @property
    def eps(self):
        """Interior angle at C_j of (Y_1, C_j, B_{j-1})."""
        return interior_angle(self.Y1, self.Cj, self.B_next)

    @property
    def eps_alt(self):
        """Interior angle at C_j of (C_i, C_j, B_{i-1})."""
        return interior_angle(self.Ci, self.Cj, self.B_prev)

    @property
    def eta(self):
        """Oriented angle at Y_1 from the ray toward B_{j-1} to the ray toward C_j."""
        return oriented_angle(self.Cj, self.Y1, self.B_next)

    @property
    def eta_interior(self):
        return interior_angle(self.Cj, self.Y1, self.B_next)

    def constants(self) -> dict:
        return {"alpha_i": self.alpha_i, "alpha_j": self.alpha_j, "d1": self.d1, "d2": self.d2, "d3": self.d3}


def pair_config(p: ChartPoint, i: int) -> PairConfig:
    """Extract the configuration, re-centred so that C_i sits at i for good conditioning."""
    n = p.n
    if not (2 <= i <= n - 2):
        raise ValueError(f"need 2 <= i <= n-2, got i={i}")
    j = i + 1
    t = build_chain(p)
    h = translate_to(t.c_vertex(i), I_POINT)
    Ci, Cj = h.act(t.c_vertex(i)), h.act(t.c_vertex(j))
    g = rotation(Ci, p.alpha[i - 1]) @ rotation(Cj, p.alpha[j - 1])
    return PairConfig(
        i, j, p.alpha[i - 1], p.alpha[j - 1],
        Ci, Cj, h.act(t.b_vertex(i - 1)), h.act(t.b_vertex(j - 1)),
        fixed_point(g), rotation_angle(g), p.gamma[i - 2],
    )


def _rel(lhs: float, rhs: float, *terms: float) -> float:
    scale = max(abs(lhs), abs(rhs), *(abs(t) for t in terms), 1e-300)
    return abs(lhs - rhs) / scale


def _measured_triangle(P, Q, R) -> TriangleData:
    """Sides opposite and interior angles at P, Q, R."""
    return TriangleData(
        dist(Q, R), dist(P, R), dist(P, Q),
        interior_angle(Q, P, R), interior_angle(P, Q, R), interior_angle(P, R, Q),
    )


def _triangle_checks(t: TriangleData) -> dict:
    out = {"cosine_law": 0.0, "dual_cosine_law": 0.0, "sine_law": 0.0, "four_parts": 0.0}
    cur = t
    for _ in range(3):
        a, b, c, A, B, C = cur.a, cur.b, cur.c, cur.A, cur.B, cur.C
        out["cosine_law"] = max(out["cosine_law"], _rel(math.cos(C), (math.cosh(a) * math.cosh(b) - math.cosh(c)) / (math.sinh(a) * math.sinh(b)), 1.0))
        out["dual_cosine_law"] = max(out["dual_cosine_law"], _rel(math.cosh(c), (math.cos(A) * math.cos(B) + math.cos(C)) / (math.sin(A) * math.sin(B))))
        out["sine_law"] = max(out["sine_law"], _rel(math.sin(A), math.sinh(a) * math.sin(B) / math.sinh(b)))
        lhs = math.cos(C) * math.cosh(a)
        t1, t2 = math.sinh(a) / math.tanh(b), math.sin(C) / math.tan(B)
        out["four_parts"] = max(out["four_parts"], _rel(lhs, t1 - t2, t1, t2))
        cur = cur.rotated()
    return out


def identity_residuals(cfg: PairConfig) -> dict:
    """Relative residual of every appendix identity on one realized configuration."""
    ai, aj = 0.5 * cfg.alpha_i, 0.5 * cfg.alpha_j
    u = 0.5 * cfg.upsilon
    d1, d2, d3, dCC, dYC = cfg.d1, cfg.d2, cfg.d3, cfg.dCC, cfg.dYC
    eps, eta = cfg.eps, cfg.eta_interior
    res = {"cosine_law": 0.0, "dual_cosine_law": 0.0, "sine_law": 0.0, "four_parts": 0.0}
    for tri in ((cfg.Ci, cfg.Cj, cfg.Y1), (cfg.Y1, cfg.Cj, cfg.B_next), (cfg.Ci, cfg.Cj, cfg.B_prev)):
        for k, v in _triangle_checks(_measured_triangle(*tri)).items():
            res[k] = max(res[k], v)

    t1 = math.sinh(dYC) / math.tanh(d3)
    t2 = math.sin(eps) / math.tan(eta)
    res["main_relation"] = _rel(math.cos(eps) * math.cosh(dYC), t1 - t2, t1, t2)

    cos_eps = (math.cosh(dCC) * math.cosh(d2) - math.cosh(d1)) / (math.sinh(dCC) * math.sinh(d2))
    res["cos_epsilon"] = _rel(math.cos(eps), cos_eps, 1.0)

    num = 1 - math.cosh(dCC) ** 2 - math.cosh(d2) ** 2 - math.cosh(d1) ** 2 + 2 * math.cosh(dCC) * math.cosh(d2) * math.cosh(d1)
    res["sin_epsilon_sq"] = _rel(math.sin(eps) ** 2, num / (math.sinh(dCC) ** 2 * math.sinh(d2) ** 2), 1.0)

    res["cosh_CiCj"] = _rel(math.cosh(dCC), (-math.cos(u) + math.cos(ai) * math.cos(aj)) / (math.sin(ai) * math.sin(aj)))
    res["cosh_Y1Cj"] = _rel(math.cosh(dYC), (-math.cos(ai) + math.cos(aj) * math.cos(u)) / (math.sin(aj) * math.sin(u)))
    res["sinh_Y1Cj"] = _rel(math.sinh(dYC), math.sinh(dCC) * math.sin(ai) / math.sin(u))

    lhs = math.sin(eps) * math.sinh(dCC) * math.sinh(d2) / math.tan(eta) * math.sin(u) * math.sin(aj)
    r1 = math.sinh(dCC) ** 2 * math.sin(ai) * math.sin(aj) / math.tanh(d3) * math.sinh(d2)
    r2 = (math.cosh(dCC) * math.cosh(d2) - math.cosh(d1)) * (math.cos(ai) - math.cos(aj) * math.cos(u))
    res["substituted_relation"] = _rel(lhs, r1 + r2, r1, r2)
    return res


APPENDIX_EQUATIONS = (
    "cosine_law", "dual_cosine_law", "sine_law", "four_parts", "main_relation", "cos_epsilon", "sin_epsilon_sq",
    "cosh_CiCj", "cosh_Y1Cj", "sinh_Y1Cj", "substituted_relation",
)


def sinh_cosh_identity_residual(x: float, y: float) -> float:
    lhs = math.sinh(x) ** 2 * math.sinh(y) ** 2 - math.cosh(x) ** 2 * math.cosh(y) ** 2
    rhs = 1 - math.cosh(x) ** 2 - math.cosh(y) ** 2
    return _rel(lhs, rhs, math.cosh(x) ** 2 * math.cosh(y) ** 2)


def main_relation_residual(cfg: PairConfig) -> float:
    """Absolute residual of the four-parts relation in (Y_1, C_j, B_{j-1}) from measured parts."""
    if dist(cfg.Y1, cfg.B_next) < 1e-9 or dist(cfg.Y1, cfg.Cj) < 1e-9:
        raise DegenerateVertex("Y_1 coincides with a vertex of the triangle")
    eps, eta = cfg.eps, cfg.eta_interior
    return abs(math.cos(eps) * math.cosh(cfg.dYC) - math.sinh(cfg.dYC) / math.tanh(cfg.d3) + math.sin(eps) / math.tan(eta))


# -- the degree 2m+4 polynomial ------------------------------------------------------------

def appendix_poly_value(c, constants: dict, m: int):
    """P(c) for c = cos(u/2), assembled from the substitution chain (valid for any real c)."""
    c = np.asarray(c, dtype=float)
    ai, aj = 0.5 * constants["alpha_i"], 0.5 * constants["alpha_j"]
    d1, d2, d3 = constants["d1"], constants["d2"], constants["d3"]
    si, sj, ci, cj = math.sin(ai), math.sin(aj), math.cos(ai), math.cos(aj)
    ch1, ch2, sh2 = math.cosh(d1), math.cosh(d2), math.sinh(d2)
    coth3 = 1.0 / math.tanh(d3)
    X = (-c + ci * cj) / (si * sj)  # cosh d(C_i, C_j)
    lhs_sq = 1 - X ** 2 - ch2 ** 2 - ch1 ** 2 + 2 * X * ch2 * ch1  # sin^2(eps) sinh^2 dCC sinh^2 d2
    rhs = (X ** 2 - 1) * si * sj * coth3 * sh2 + (X * ch2 - ch1) * (ci - cj * c)
    T2 = cheb_cos(m, c) ** 2
    return lhs_sq * T2 * (1 - c ** 2) * sj ** 2 - (1 - T2) * rhs ** 2


def leading_coefficient_closed_form(constants: dict, m: int) -> float:
    ai, aj = 0.5 * constants["alpha_i"], 0.5 * constants["alpha_j"]
    d2, d3 = constants["d2"], constants["d3"]
    k = 1.0 / math.tanh(d3) * math.sinh(d2) + math.cosh(d2) * math.cos(aj)
    return 2.0 ** (2 * m - 2) / math.sin(ai) ** 2 * (1.0 + k ** 2 / math.sin(aj) ** 2)


@dataclass
class PolynomialReport:
    m: int
    constants: dict
    degree_residual: float
    leading_fd: float
    leading_closed: float
    leading_rel_err: float
    positive: bool
    roots_in_range: list = field(default_factory=list)

    def __call__(self, c):
        return appendix_poly_value(c, self.constants, self.m)

    def to_json(self) -> dict:
        return {
            "m": self.m, "constants": self.constants, "degree_residual": self.degree_residual,
            "leading_fd": self.leading_fd, "leading_closed": self.leading_closed,
            "leading_rel_err": self.leading_rel_err, "positive": self.positive,
            "roots_in_range": self.roots_in_range,
        }


def appendix_polynomial(constants: dict, m: int, lo: float = -2.0, hi: float = 2.0) -> PolynomialReport:
    deg = 2 * m + 4
    f = lambda c: appendix_poly_value(c, constants, m)
    # degree bound: the (deg+1)-th difference on deg+2 equispaced nodes vanishes
    xs = np.linspace(lo, hi, deg + 2)
    v = f(xs)
    weights = np.array([math.comb(deg + 1, k) for k in range(deg + 2)], dtype=float)
    degree_residual = float(abs(forward_difference(v, deg + 1)[0]) / np.sum(weights * np.abs(v)))
    xs = np.linspace(lo, hi, deg + 1)
    h = xs[1] - xs[0]
    lead = float(forward_difference(f(xs), deg)[0] / (math.factorial(deg) * h ** deg))
    closed = leading_coefficient_closed_form(constants, m)
    # real roots strictly inside (-1, 1); the factor 1 - c^2 contributes the trivial roots at +-1
    nodes = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
    coef = np.polynomial.chebyshev.chebfit(nodes, f(nodes), deg)
    roots = np.polynomial.chebyshev.chebroots(coef)
    real = sorted(float(r.real) for r in roots if abs(r.imag) < 1e-9 and abs(r.real) < 1.0 - 1e-9)
    return PolynomialReport(m, dict(constants), degree_residual, lead, closed, abs(lead - closed) / abs(closed), lead > 0, real)
