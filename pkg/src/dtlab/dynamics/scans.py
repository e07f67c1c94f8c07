"""One-parameter scans of angle coordinates and the quantities that single out exceptional sets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..chain import ChartPoint, build_chain
from ..errors import DegenerateVertex, NonElliptic
from ..holonomy import CurveWord, b_word, evaluate, holonomy
from ..hplane import TWO_PI, dist, fixed_point, wrap
from ..symplectic import angle_observable, d_gamma
from ..trig import cheb_cos
from .appendix import pair_config

# grid points sit at 2pi (k + GRID_OFFSET) / grid so that small grids avoid the symmetric angles
GRID_OFFSET = 0.3819660112501051
FIT_REL_LIMIT = 1e-6
COINCIDE_TOL = 1e-9


@dataclass
class ScanReport:
    name: str
    parameter: str
    grid: list
    columns: dict
    zeros: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    fit: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name, "parameter": self.parameter, "grid": self.grid, "columns": self.columns,
            "zeros": self.zeros, "expected": self.expected, "fit": self.fit,
            "residuals": self.residuals, "meta": self.meta,
        }

    def rows(self) -> list:
        """Long format: (scan, grid_index, parameter, quantity, value)."""
        out = []
        for q, vals in self.columns.items():
            for k, v in enumerate(vals):
                out.append((self.name, k, self.grid[k], q, v))
        return out


def scan_grid(grid: int) -> np.ndarray:
    if grid < 1:
        raise ValueError("grid must be positive")
    return TWO_PI * (np.arange(grid) + GRID_OFFSET) / grid


def _with_gamma(p: ChartPoint, slot: int, value: float) -> ChartPoint:
    g = list(p.gamma)
    g[slot - 1] = wrap(value)
    return p.with_gamma(g)


def _circle_gap(x: float, y: float) -> float:
    d = abs(wrap(x) - wrap(y))
    return min(d, TWO_PI - d)


def _sign_change_zeros(f, xs, ys) -> list:
    """Roots of a smooth periodic f bracketed by consecutive samples, refined by Brent's method."""
    roots = []
    m = len(xs)
    if m < 2:
        return roots
    for k in range(m):
        a, fa = xs[k], ys[k]
        b, fb = (xs[k + 1], ys[k + 1]) if k + 1 < m else (xs[0] + TWO_PI, ys[0])
        if fa == 0.0:
            roots.append(wrap(a))
        elif fa * fb < 0.0:
            roots.append(wrap(brentq(f, a, b, xtol=1e-13)))
    return sorted(roots)


# ---------------------------------------------------------------------------
# affine relation between cos(u/2) and cos(gamma)


def _half_cos(p: ChartPoint, i: int) -> float:
    return math.cos(pair_config(p, i).rot_pair / 2.0)


def k1_closed_form(p: ChartPoint, i: int) -> float:
    cfg = pair_config(p, i)
    return math.sin(cfg.alpha_i / 2) * math.sin(cfg.alpha_j / 2) * math.sinh(cfg.d1) * math.sinh(cfg.d2)


def upsilon_gamma_fit(p_template: ChartPoint, i: int, j: int | None = None, grid: int = 16) -> ScanReport:
    """Sweep gamma_{i-1} and fit cos(u/2) = k1 cos(gamma) + k2, u the rotation angle of rho(c_i c_j)."""
    j = i + 1 if j is None else j
    if j != i + 1:
        raise ValueError("the swept configuration uses consecutive punctures j = i + 1")
    if not (2 <= i <= p_template.n - 2):
        raise ValueError(f"need 2 <= i <= n-2, got i={i}")
    slot = i - 1
    gs = scan_grid(grid)
    xs, cs, gaps = [], [], []
    for k, g in enumerate(gs):
        try:
            cs.append(_half_cos(_with_gamma(p_template, slot, g), i))
            xs.append(float(g))
        except NonElliptic:
            gaps.append(k)
    xs_arr = np.array(xs)
    cs_arr = np.array(cs)
    if len(xs) >= 2:
        A = np.column_stack([np.cos(xs_arr), np.ones_like(xs_arr)])
        (k1, k2), *_ = np.linalg.lstsq(A, cs_arr, rcond=None)
        resid = float(np.max(np.abs(A @ np.array([k1, k2]) - cs_arr)))
    else:
        k1, k2, resid = math.nan, math.nan, math.nan
    scale = max(1.0, float(np.max(np.abs(cs_arr)))) if len(cs) else 1.0
    rel = resid / scale
    exact = k1_closed_form(p_template, i)
    return ScanReport(
        "upsilon_gamma", f"gamma_{slot}", xs, {"cos_half_u": cs},
        fit={"k1": float(k1), "k2": float(k2), "k1_closed_form": exact,
             "accepted": bool(rel <= FIT_REL_LIMIT)},
        residuals={"max_abs": resid, "relative": rel, "k1_abs_vs_closed_form": abs(abs(k1) - exact)},
        meta={"i": i, "j": j, "gaps": gaps, "template": p_template.to_json()},
    )


# ---------------------------------------------------------------------------
# separation of D_1 from B_2 and the bracket that drives the selector

_VARIANTS = {
    "c2c3": (2, 3),
    "c1c3": (1, 3),
}


def expected_bracket_zeros(p: ChartPoint, variant: str) -> list:
    if variant == "c2c3":
        return [0.0, math.pi]
    b = p.beta[0]
    return sorted([wrap(math.pi - b / 2), wrap(TWO_PI - b / 2)])


def closest_configuration(p: ChartPoint, variant: str) -> float:
    """The gamma_1 at which the chain makes D_1 closest to B_2."""
    return math.pi if variant == "c2c3" else wrap(TWO_PI - p.beta[0] / 2)


def claim_scan_D1B2(p_template: ChartPoint, variant: str = "c2c3", grid: int = 64) -> ScanReport:
    """Sweep gamma_1; record d(D_1, B_2) and the derivative of the angle of d_1 along the flow about B_1."""
    if variant not in _VARIANTS:
        raise ValueError(f"variant must be one of {sorted(_VARIANTS)}")
    n = p_template.n
    if n < 5:
        raise ValueError("the scan needs n >= 5")
    a, b = _VARIANTS[variant]
    word = (CurveWord.gen(a) * CurveWord.gen(b)).inv()
    obs = angle_observable(word)
    bw = b_word(2, n)

    def point(g):
        return _with_gamma(p_template, 1, g)

    def separation(g):
        q = point(g)
        rep = holonomy(build_chain(q), q.alpha)
        return dist(fixed_point(evaluate(rep, word)), fixed_point(evaluate(rep, bw)))

    def bracket(g):
        return d_gamma(point(g), obs, 1, check=False).value

    gs = scan_grid(grid)
    seps = [separation(g) for g in gs]
    brs = [bracket(g) for g in gs]
    zeros = _sign_change_zeros(bracket, list(gs), brs) if grid >= 2 else []
    expected = expected_bracket_zeros(p_template, variant)
    matched = [min(_circle_gap(z, e) for e in expected) for z in zeros]
    covered = [min((_circle_gap(z, e) for z in zeros), default=math.inf) for e in expected]

    # the separation minimum, refined around the best grid sample
    closest = closest_configuration(p_template, variant)
    step = TWO_PI / grid
    if grid >= 3:
        k = int(np.argmin(seps))
        res = minimize_scalar(separation, bounds=(gs[k] - step, gs[k] + step), method="bounded",
                              options={"xatol": 1e-10})
        sep_min_at, sep_min = wrap(float(res.x)), float(res.fun)
    else:
        k = int(np.argmin(seps))
        sep_min_at, sep_min = float(gs[k]), float(seps[k])
    window = 2.0 * step
    away = [s for g, s in zip(gs, seps) if min(_circle_gap(g, e) for e in expected) > window]
    return ScanReport(
        f"D1B2_{variant}", "gamma_1", gs.tolist(), {"separation": seps, "bracket": brs},
        zeros={"bracket": zeros, "separation_min_at": [sep_min_at]},
        expected={"bracket": expected, "separation_min_at": [closest]},
        residuals={
            "zero_offsets": matched,
            "max_zero_offset": max(matched, default=0.0),
            "max_missing": max(covered, default=0.0),
            "separation_min_offset": _circle_gap(sep_min_at, closest),
        },
        meta={"variant": variant, "separation_min": sep_min,
              "separation_min_away": min(away, default=math.nan), "grid_step": step,
              "template": p_template.to_json()},
    )


# ---------------------------------------------------------------------------
# the relation cos(eta) = cos(m u / 2) with u the angle at Y_1


def _eta_gap(p: ChartPoint, i: int, m: int) -> tuple[float, float, float]:
    cfg = pair_config(p, i)
    if dist(cfg.Y1, cfg.B_next) < COINCIDE_TOL:
        raise DegenerateVertex("Y_1 coincides with B_{j-1}")
    ce = math.cos(cfg.eta)
    t = cheb_cos(m, math.cos(cfg.upsilon / 2))
    return min(abs(ce - t), abs(ce + t)), ce * ce - t * t, math.cos(cfg.upsilon / 2)


def eta_relation_check(p_template: ChartPoint, i: int, m: int, grid: int = 1) -> ScanReport:
    """Measure min over signs of |cos(eta) -+ T_m(cos(u/2))|; grid > 1 also sweeps gamma_{i-1} for roots."""
    if m < 1:
        raise ValueError("m must be positive")
    slot = i - 1
    if grid == 1:
        gs = [p_template.gamma[slot - 1]]
    else:
        gs = scan_grid(grid).tolist()
    gaps, sq, cvals = [], [], []
    for g in gs:
        gap, d2, c = _eta_gap(_with_gamma(p_template, slot, g), i, m)
        gaps.append(gap)
        sq.append(d2)
        cvals.append(c)
    roots = []
    if grid > 1:
        roots = _sign_change_zeros(lambda g: _eta_gap(_with_gamma(p_template, slot, g), i, m)[1], gs, sq)
    return ScanReport(
        f"eta_m{m}", f"gamma_{slot}", list(gs), {"gap": gaps, "cos2_diff": sq, "cos_half_u": cvals},
        zeros={"relation": roots},
        residuals={"min_gap": min(gaps)},
        meta={"i": i, "m": m, "satisfied": bool(min(gaps) < 1e-9), "template": p_template.to_json()},
    )


def engineered_eta_point(p_template: ChartPoint, i: int, m: int, grid: int = 256) -> ChartPoint | None:
    """A point on the gamma_{i-1} circle where the relation holds, or None if the circle misses it."""
    rep = eta_relation_check(p_template, i, m, grid)
    roots = rep.zeros["relation"]
    if not roots:
        return None
    return _with_gamma(p_template, i - 1, roots[0])


def degenerate_pi_point(p_template: ChartPoint, i: int, samples: int = 200) -> ChartPoint | None:
    """Set gamma_{i-1} = pi and tune beta_i so that Y_1 lands on B_{j-1}; None if no such beta_i.

    At gamma_{i-1} = pi the point Y_1 already lies on the ray from C_j through B_{j-1}, so a single
    distance condition remains.
    """
    n = p_template.n
    if not (2 <= i <= n - 3):
        raise ValueError("need 2 <= i <= n-3 so that beta_i is a free coordinate")
    base = _with_gamma(p_template, i - 1, math.pi)
    alpha = base.alpha
    fb = [TWO_PI - alpha[0], *base.beta, alpha[-1]]
    # beta_i sits between the slacks of triangles i-1 and i
    lo = fb[i - 1] + TWO_PI - alpha[i]
    hi = fb[i + 1] + alpha[i + 1] - TWO_PI
    if not lo < hi:
        return None

    def at(b):
        beta = list(base.beta)
        beta[i - 1] = b
        return base.with_beta(beta)

    def gap(b):
        cfg = pair_config(at(b), i)
        return cfg.dYC - cfg.d3

    pad = 1e-9 * (hi - lo)
    bs = np.linspace(lo + pad, hi - pad, samples)
    vals = [gap(b) for b in bs]
    for k in range(samples - 1):
        if vals[k] == 0.0:
            return at(bs[k])
        if vals[k] * vals[k + 1] < 0.0:
            return at(brentq(gap, bs[k], bs[k + 1], xtol=1e-15))
    return None
