"""Dehn twist actions on the chart, on triangle chains and on representations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .chain import ChartPoint, TriangleChain
from .errors import SingularFiber
from .holonomy import CurveWord, Representation, evaluate
from .hplane import (
    I_POINT,
    Isometry,
    dist,
    direction,
    fixed_point,
    rotation,
    translate_to,
    wrap,
)

COINCIDENCE_TOL = 1e-7
CONJUGACY_TOL = 1e-7


@dataclass(frozen=True)
class TwistSpec:
    kind: str  # "pants" or "pair"
    k: Optional[int] = None
    i: Optional[int] = None
    j: Optional[int] = None
    power: int = 1

    def __post_init__(self):
        if self.kind == "pants":
            if self.k is None or self.k < 1:
                raise ValueError("pants twist needs an index k >= 1")
        elif self.kind == "pair":
            if self.i is None or self.j is None or not (1 <= self.i < self.j):
                raise ValueError("pair twist needs 1 <= i < j")
        else:
            raise ValueError(f"unknown twist kind {self.kind!r}")

    @classmethod
    def pants(cls, k: int, power: int = 1) -> "TwistSpec":
        return cls("pants", k=k, power=power)

    @classmethod
    def pair(cls, i: int, j: int, power: int = 1) -> "TwistSpec":
        return cls("pair", i=i, j=j, power=power)

    def inverse(self) -> "TwistSpec":
        return TwistSpec(self.kind, self.k, self.i, self.j, -self.power)

    def validate(self, n: int) -> None:
        if self.kind == "pants" and not (1 <= self.k <= n - 3):
            raise ValueError(f"pants index {self.k} outside 1..{n - 3}")
        if self.kind == "pair" and self.j > n:
            raise ValueError(f"pair ({self.i},{self.j}) outside 1..{n}")

    def to_json(self) -> dict:
        if self.kind == "pants":
            return {"kind": "pants", "k": self.k, "power": self.power}
        return {"kind": "pair", "i": self.i, "j": self.j, "power": self.power}

    @classmethod
    def from_json(cls, d: dict) -> "TwistSpec":
        if d["kind"] == "pants":
            return cls.pants(int(d["k"]), int(d.get("power", 1)))
        return cls.pair(int(d["i"]), int(d["j"]), int(d.get("power", 1)))


def twist_pants(p: ChartPoint, k: int, power: int = 1) -> ChartPoint:
    if not (1 <= k <= p.n - 3):
        raise ValueError(f"pants index {k} outside 1..{p.n - 3}")
    g = p.gamma[k - 1]
    if g is None:
        raise SingularFiber(f"angle coordinate {k} is undefined at this point")
    gamma = list(p.gamma)
    gamma[k - 1] = wrap(g + power * p.beta[k - 1])
    return p.with_gamma(gamma)


def twist_flow(t: TriangleChain, k: int, time: float) -> TriangleChain:
    """Rotate the part of the chain beyond B_k (triangles k..n-3) counterclockwise about B_k."""
    n = t.n
    if not (1 <= k <= n - 3):
        raise ValueError(f"pants index {k} outside 1..{n - 3}")
    g = rotation(t.b_vertex(k), time)
    C = tuple(g.act(c) if idx >= k + 1 else c for idx, c in enumerate(t.C))
    B = tuple(g.act(b) if idx >= k else b for idx, b in enumerate(t.B))
    return TriangleChain(C, B, t.degenerate)


def _pair_step(gens: list, i: int, j: int, forward: bool) -> list:
    ci, cj = gens[i - 1], gens[j - 1]
    X = ci @ cj
    Xi = X.inv()
    Z = cj.inv() @ ci.inv() @ cj @ ci
    out = list(gens)
    if forward:
        # precompose with the inverse automorphism
        outer, outer_inv = X, Xi
        mid = X @ Z.inv() @ Xi
    else:
        outer, outer_inv = Xi, X
        mid = Z
    mid_inv = mid.inv()
    for k in (i, j):
        out[k - 1] = outer @ gens[k - 1] @ outer_inv
    for k in range(i + 1, j):
        out[k - 1] = mid @ gens[k - 1] @ mid_inv
    return out


def twist_paircurve(rep: Representation, i: int, j: int, power: int = 1) -> Representation:
    if not (1 <= i < j <= rep.n):
        raise ValueError("need 1 <= i < j <= n")
    gens = list(rep.gens)
    for _ in range(abs(power)):
        gens = _pair_step(gens, i, j, power > 0)
    return Representation(tuple(gens), rep.alpha)


def apply_twist(rep: Representation, spec: TwistSpec) -> Representation:
    """Representation-level action of either twist family."""
    if spec.kind == "pair":
        return twist_paircurve(rep, spec.i, spec.j, spec.power)
    return _pants_on_rep(rep, spec.k, spec.power)


def _pants_on_rep(rep: Representation, k: int, power: int) -> Representation:
    # b_k^-1 = c_1...c_{k+1}; the twist conjugates c_1..c_{k+1} by a power of that product
    P = evaluate(rep, CurveWord.product(*range(1, k + 2)))
    h = P
    for _ in range(abs(power) - 1):
        h = h @ P
    if power < 0:
        h = h.inv()
    if power == 0:
        return rep
    hi = h.inv()
    gens = [h @ g @ hi if idx < k + 1 else g for idx, g in enumerate(rep.gens)]
    return Representation(tuple(gens), rep.alpha)


def _coincide(points, tol: float) -> bool:
    pts = list(points)
    return all(dist(p, q) < tol for a, p in enumerate(pts) for q in pts[a + 1 :])


def upsilon_exterior(rep: Representation, i: int, j: int):
    """Exterior vertices other than C_i, C_j of the chain adapted to the pair curve c_i c_j."""
    n = rep.n
    zeta = CurveWord.product(*range(j, n + 1), *range(1, i))
    zinv = evaluate(rep, zeta).inv()
    pts = [fixed_point(rep.gens[k - 1]) for k in list(range(j + 1, n + 1)) + list(range(1, i))]
    pts += [zinv.act(fixed_point(rep.gens[k - 1])) for k in range(i + 1, j)]
    return pts


def is_twist_fixed(rep: Representation, i: int, j: int, tol: float = COINCIDENCE_TOL) -> bool:
    """Whether the twist along c_i c_j fixes the conjugacy class of rep.

    Fixed exactly when C_i = C_j, or when every exterior vertex of the chain adapted to
    c_i c_j other than C_i, C_j coincides.  For i, j adjacent these read C_i = C_j and
    C_{j+1} = ... = C_n = C_1 = ... = C_{i-1}.
    """
    if not (1 <= i < j <= rep.n):
        raise ValueError("need 1 <= i < j <= n")
    Ci = fixed_point(rep.gens[i - 1])
    Cj = fixed_point(rep.gens[j - 1])
    if dist(Ci, Cj) < tol:
        return True
    return _coincide(upsilon_exterior(rep, i, j), tol)


def _normal_frame(F, far: int) -> Isometry:
    """Isometry sending F[0] to i with the direction toward F[far] pointing along +x."""
    g = translate_to(F[0], I_POINT)
    return translate_to(I_POINT, I_POINT, -direction(I_POINT, g.act(F[far]))) @ g


def conjugacy_equal(rep1: Representation, rep2: Representation, tol: float = CONJUGACY_TOL) -> bool:
    """Compare conjugacy classes by moving both into the frame fixed by C_1 and a far vertex."""
    if rep1.n != rep2.n:
        return False
    if any(abs(a - b) > tol for a, b in zip(rep1.alpha, rep2.alpha)):
        return False
    F1 = [fixed_point(g) for g in rep1.gens]
    F2 = [fixed_point(g) for g in rep2.gens]
    far = max(range(rep1.n), key=lambda k: dist(F1[0], F1[k]))
    r = dist(F1[0], F1[far])
    if abs(dist(F2[0], F2[far]) - r) > tol * max(1.0, r):
        return False
    if r < tol:
        return all(dist(F2[0], q) < tol for q in F2)
    g1 = _normal_frame(F1, far)
    g2 = _normal_frame(F2, far)
    n1 = rep1.conjugate(g1).gens
    n2 = rep2.conjugate(g2).gens
    for a, b in zip(n1, n2):
        scale = max(1.0, max(abs(v) for v in a.entries()))
        if a.distance(b) > tol * scale:
            return False
    return True
