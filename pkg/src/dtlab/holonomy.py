"""Representations from triangle chains, words in the generators, angle functions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .chain import TriangleChain
from .errors import HolonomyMismatch, NotClosed
from .hplane import IDENTITY, Isometry, dist, fixed_point, rotation, rotation_angle

PRODUCT_TOL = 1e-8


class CurveWord:
    """A freely reduced word in c_1..c_n, stored as signed generator indices."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable = ()):
        out: list[int] = []
        for item in letters:
            if isinstance(item, tuple):
                idx, exp = item
                s = int(idx) * (1 if exp > 0 else -1)
            else:
                s = int(item)
            if s == 0:
                raise ValueError("generator indices start at 1")
            if out and out[-1] == -s:
                out.pop()
            else:
                out.append(s)
        self.letters = tuple(out)

    @classmethod
    def gen(cls, i: int) -> "CurveWord":
        return cls((i,))

    @classmethod
    def product(cls, *indices: int) -> "CurveWord":
        return cls(indices)

    def inv(self) -> "CurveWord":
        return CurveWord(-s for s in reversed(self.letters))

    def __mul__(self, o: "CurveWord") -> "CurveWord":
        return CurveWord(self.letters + o.letters)

    def __eq__(self, o):
        return isinstance(o, CurveWord) and self.letters == o.letters

    def __hash__(self):
        return hash(self.letters)

    def __len__(self):
        return len(self.letters)

    def __repr__(self):
        return f"CurveWord({list(self.letters)})"

    def __str__(self):
        if not self.letters:
            return "1"
        return "".join(f"c{abs(s)}" + ("" if s > 0 else "^-1") for s in self.letters)

    def pairs(self):
        return [(abs(s), 1 if s > 0 else -1) for s in self.letters]

    def to_json(self) -> list:
        return list(self.letters)

    @classmethod
    def from_json(cls, data) -> "CurveWord":
        return cls(data)

    def substitute(self, images: dict) -> "CurveWord":
        """Replace each generator c_i by the word images[i] (identity on missing keys)."""
        out: list[int] = []
        for s in self.letters:
            w = images.get(abs(s), CurveWord.gen(abs(s)))
            out.extend(w.letters if s > 0 else w.inv().letters)
        return CurveWord(out)


def b_word(k: int, n: int) -> CurveWord:
    """Pants curve b_k = (c_1...c_{k+1})^-1, with b_0 = c_1^-1 and b_{n-2} written as c_n."""
    if k == n - 2:
        return CurveWord.gen(n)
    return CurveWord.product(*range(1, k + 2)).inv()


def pair_word(i: int, j: int) -> CurveWord:
    return CurveWord.product(i, j)


@dataclass(frozen=True)
class Representation:
    gens: tuple
    alpha: tuple

    @property
    def n(self) -> int:
        return len(self.gens)

    def product(self) -> Isometry:
        g = IDENTITY
        for h in self.gens:
            g = g @ h
        return g

    def to_json(self) -> dict:
        return {"gens": [g.to_json() for g in self.gens], "alpha": list(self.alpha)}

    def conjugate(self, h: Isometry) -> "Representation":
        hi = h.inv()
        return Representation(tuple(h @ g @ hi for g in self.gens), self.alpha)


def holonomy(t: TriangleChain, alpha: Sequence[float], check: bool = True) -> Representation:
    gens = tuple(rotation(c, a) for c, a in zip(t.C, alpha))
    rep = Representation(gens, tuple(float(a) for a in alpha))
    if check:
        err = rep.product().distance(IDENTITY)
        if err > PRODUCT_TOL:
            raise HolonomyMismatch(f"generator product is {err:.3g} away from the identity")
    return rep


def evaluate(rep: Representation, w: CurveWord) -> Isometry:
    g = IDENTITY
    gens = rep.gens
    for s in w.letters:
        h = gens[s - 1] if s > 0 else gens[-s - 1].inv()
        g = g @ h
    return g


def angle_function(rep: Representation, w: CurveWord) -> float:
    return rotation_angle(evaluate(rep, w))


def restrict_subsphere(rep: Representation, peripheral_words: Sequence[CurveWord], tol: float = PRODUCT_TOL) -> Representation:
    if len(peripheral_words) != 4:
        raise ValueError("a sub-sphere has exactly four peripheral words")
    gens = tuple(evaluate(rep, w) for w in peripheral_words)
    prod = gens[0] @ gens[1] @ gens[2] @ gens[3]
    if prod.distance(IDENTITY) > tol:
        raise NotClosed(f"peripheral words multiply to {prod.distance(IDENTITY):.3g} away from the identity")
    return Representation(gens, tuple(rotation_angle(g) for g in gens))


def chain_from_rep(rep: Representation, tol: float = 1e-7) -> TriangleChain:
    """Recover the triangle chain of a representation of the standard pants decomposition."""
    n = rep.n
    C = tuple(fixed_point(g) for g in rep.gens)
    bs = [C[0]]
    for k in range(1, n - 2):
        bs.append(fixed_point(evaluate(rep, b_word(k, n))))
    bs.append(C[-1])
    degenerate = []
    for k in range(n - 2):
        tri = (bs[k], C[k + 1], bs[k + 1])
        degenerate.append(dist(tri[0], tri[1]) < tol and dist(tri[0], tri[2]) < tol)
    return TriangleChain(C, tuple(bs[1 : n - 2]), tuple(degenerate))
