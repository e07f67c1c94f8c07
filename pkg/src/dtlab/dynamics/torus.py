"""Torus rotations: orbits, star-discrepancy estimates and Birkhoff averages."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.stats import qmc

TWO_PI = 2.0 * math.pi
N_BOXES = 2048


def _battery(d: int):
    """Ten fixed observables on the d-torus with their exact Lebesgue integrals."""
    last = d - 1

    def freq(x, k):
        return x @ np.asarray(k, dtype=float)

    e1 = np.eye(d)[0]
    ed = np.eye(d)[last]
    ones = np.ones(d)
    return {
        "cos_x1": (lambda x: np.cos(x[:, 0]), 0.0),
        "sin_x1": (lambda x: np.sin(x[:, 0]), 0.0),
        "cos_2x1": (lambda x: np.cos(2.0 * x[:, 0]), 0.0),
        "sin_3xd": (lambda x: np.sin(3.0 * x[:, last]), 0.0),
        "cos_x1_plus_xd": (lambda x: np.cos(freq(x, e1 + ed)), 0.0),
        "sin_x1_minus_2xd": (lambda x: np.sin(freq(x, e1 - 2 * ed)), 0.0),
        "cos_sum": (lambda x: np.cos(freq(x, ones)), 0.0),
        "sin_2sum": (lambda x: np.sin(freq(x, 2 * ones)), 0.0),
        "cos2_x1": (lambda x: np.cos(x[:, 0]) ** 2, 0.5),
        "saw_xd": (lambda x: x[:, last] / TWO_PI, 0.5),
    }


def battery_integrals(d: int) -> dict:
    return {k: v[1] for k, v in _battery(d).items()}


@dataclass
class TorusOrbit:
    dim: int
    rotation: np.ndarray
    length: int
    discrepancy: float
    birkhoff: dict
    errors: dict = field(default_factory=dict)
    dyadic: list = field(default_factory=list)  # (length, discrepancy) pairs

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "rotation": list(map(float, self.rotation)),
            "length": self.length,
            "discrepancy": self.discrepancy,
            "birkhoff": self.birkhoff,
            "errors": self.errors,
            "dyadic": self.dyadic,
        }


def anchored_boxes(d: int, count: int = N_BOXES, seed: int = 0) -> np.ndarray:
    """Upper corners of anchored boxes [0, u) drawn from a scrambled Sobol sequence."""
    return qmc.Sobol(d, scramble=True, seed=seed).random(count)


@njit(cache=True)
def _box_counts(pts, boxes):
    """Points must be sorted on the first coordinate."""
    N, d = pts.shape
    counts = np.zeros(boxes.shape[0], dtype=np.int64)
    for b in range(boxes.shape[0]):
        c = 0
        for i in range(N):
            if pts[i, 0] >= boxes[b, 0]:
                break
            inside = True
            for k in range(1, d):
                if pts[i, k] >= boxes[b, k]:
                    inside = False
                    break
            if inside:
                c += 1
        counts[b] = c
    return counts


def star_discrepancy(points: np.ndarray, boxes: np.ndarray | None = None) -> float:
    """max over the box family of |fraction of points in [0,u) - vol([0,u))| for points in [0,1)^d."""
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=float)))
    if pts.shape[0] == 0:
        return 1.0
    d = pts.shape[1]
    if boxes is None:
        boxes = anchored_boxes(d)
    counts = _box_counts(pts[np.argsort(pts[:, 0], kind="stable")], np.ascontiguousarray(boxes, dtype=float))
    vol = np.prod(boxes, axis=1)
    return float(np.max(np.abs(counts / pts.shape[0] - vol)))


def orbit_points(x, rotation, steps: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    rot = np.asarray(rotation, dtype=float)
    t = np.arange(steps, dtype=float)[:, None]
    return np.mod(x[None, :] + t * rot[None, :], TWO_PI)


def torus_rotate(x, rotation, steps: int, boxes: int = N_BOXES, seed: int = 0, dyadic: bool = True) -> TorusOrbit:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rot = np.atleast_1d(np.asarray(rotation, dtype=float))
    d = x.size
    if d < 1 or rot.size != d:
        raise ValueError("start point and rotation vector must share a positive dimension")
    if steps < 1:
        raise ValueError("need at least one step")
    pts = orbit_points(x, rot, steps)
    box = anchored_boxes(d, boxes, seed)
    unit = pts / TWO_PI
    disc = star_discrepancy(unit, box)
    checkpoints = []
    if dyadic:
        L = 16
        while L < steps:
            checkpoints.append((L, star_discrepancy(unit[:L], box)))
            L *= 2
        checkpoints.append((steps, disc))
    birk, errs = {}, {}
    for name, (f, integral) in _battery(d).items():
        avg = float(np.mean(f(pts)))
        birk[name] = avg
        errs[name] = abs(avg - integral)
    return TorusOrbit(d, rot, steps, disc, birk, errs, checkpoints)


def birkhoff_tolerance(N: int) -> float:
    return 5.0 * N ** -0.5 * math.log(N)
