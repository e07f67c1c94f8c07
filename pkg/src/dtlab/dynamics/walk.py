"""Random walks of Dehn twists on a DT component and their Birkhoff statistics."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..chain import ChartPoint, check_regime, polytope_box, regime_excess
from ..errors import SingularFiberEncountered
from ..mcg import TwistSpec
from . import kernel
from .sampler import as_generator, goldman_batch

OBS_NAMES = (
    "cos_g1", "sin_g1", "cos_2g1", "sin_2g1",
    "t1", "t1_sq", "t1_cos_g1", "t1_sin_g1", "cos_2pi_t1", "sin_pi_t1",
)
DEFAULT_BATCH = 10_000


def encode_twists(twists: Sequence[TwistSpec], n: int) -> np.ndarray:
    rows = []
    for tw in twists:
        tw.validate(n)
        if tw.power != 1:
            raise ValueError("walk generators must be single twists; inverses are added automatically")
        rows.append((0, tw.k, 0) if tw.kind == "pants" else (1, tw.i, tw.j))
    if not rows:
        raise ValueError("empty twist family")
    return np.array(rows, dtype=np.int64)


def default_twists(n: int) -> list:
    """All pants-curve twists plus the twists along c_{k+1} c_{k+2}, k = 1..n-3."""
    fam = [TwistSpec.pants(k) for k in range(1, n - 2)]
    fam += [TwistSpec.pair(k + 1, k + 2) for k in range(1, n - 2)]
    return fam


def observables(beta: np.ndarray, gamma: np.ndarray, alpha) -> np.ndarray:
    """The observable battery for rows of chart coordinates; shape (rows, 10)."""
    lo, _ = polytope_box(alpha)
    s = regime_excess(alpha)
    beta = np.atleast_2d(beta)
    gamma = np.atleast_2d(gamma)
    t = (beta[:, 0] - lo[0]) / s
    g = gamma[:, 0]
    return np.column_stack([
        np.cos(g), np.sin(g), np.cos(2 * g), np.sin(2 * g),
        t, t * t, t * np.cos(g), t * np.sin(g), np.cos(2 * np.pi * t), np.sin(np.pi * t),
    ])


@dataclass
class WalkState:
    """Everything needed to resume a walk bit-identically."""

    alpha: tuple
    beta: list
    gamma: list
    twists: list
    steps_done: int
    totals: list
    batch_sums: list
    batch_sizes: list
    rejected: int
    rng_state: dict
    batch: int = DEFAULT_BATCH

    def to_json(self) -> dict:
        return {
            "alpha": list(self.alpha), "beta": list(self.beta), "gamma": list(self.gamma),
            "twists": [t.to_json() for t in self.twists], "steps_done": self.steps_done,
            "totals": list(self.totals), "batch_sums": [list(b) for b in self.batch_sums],
            "batch_sizes": list(self.batch_sizes), "rejected": self.rejected,
            "rng_state": self.rng_state, "batch": self.batch,
        }

    @classmethod
    def from_json(cls, d: dict) -> "WalkState":
        return cls(
            tuple(d["alpha"]), list(d["beta"]), list(d["gamma"]),
            [TwistSpec.from_json(t) for t in d["twists"]], int(d["steps_done"]),
            list(d["totals"]), [list(b) for b in d["batch_sums"]], list(d["batch_sizes"]),
            int(d["rejected"]), d["rng_state"], int(d.get("batch", DEFAULT_BATCH)),
        )

    def save(self, path) -> None:
        from ..io import atomic_write_text
        atomic_write_text(path, json.dumps(self.to_json()))

    @classmethod
    def load(cls, path) -> "WalkState":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class WalkSummary:
    steps: int
    mean: dict
    stderr: dict
    rejected: int
    final: ChartPoint
    state: WalkState = field(repr=False, default=None)

    def to_json(self) -> dict:
        return {"steps": self.steps, "mean": self.mean, "stderr": self.stderr, "rejected": self.rejected,
                "final": self.final.to_json()}


def start_walk(p: ChartPoint, twists: Sequence[TwistSpec], rng_seed=None, batch: int = DEFAULT_BATCH) -> WalkState:
    check_regime(p.alpha)
    if not p.regular:
        raise SingularFiberEncountered("walks start from regular points")
    encode_twists(twists, p.n)
    rng = as_generator(rng_seed)
    first = observables(np.array(p.beta), np.array(p.gamma), p.alpha)[0]
    return WalkState(p.alpha, list(p.beta), list(p.gamma), list(twists), 0, first.tolist(), [], [], 0,
                     rng.bit_generator.state, batch)


def advance(state: WalkState, steps: int) -> WalkState:
    """Run the walk for more steps, in place. Batches are aligned to multiples of state.batch."""
    alpha = np.array(state.alpha)
    beta = np.array(state.beta)
    gamma = np.array(state.gamma)
    tw = encode_twists(state.twists, len(alpha))
    lo, _ = polytope_box(state.alpha)
    s = regime_excess(state.alpha)
    rng = np.random.default_rng()
    rng.bit_generator.state = state.rng_state
    totals = np.array(state.totals)
    remaining = steps
    while remaining > 0:
        pos = state.steps_done % state.batch
        take = min(state.batch - pos, remaining)
        u = rng.random(take)
        sums, rej = kernel.run_walk(alpha, beta, gamma, tw, u, lo[0], s)
        if pos == 0:
            state.batch_sums.append(sums.tolist())
            state.batch_sizes.append(take)
        else:
            state.batch_sums[-1] = (np.array(state.batch_sums[-1]) + sums).tolist()
            state.batch_sizes[-1] += take
        totals += sums
        state.rejected += int(rej)
        state.steps_done += take
        remaining -= take
    state.beta, state.gamma = beta.tolist(), gamma.tolist()
    state.totals = totals.tolist()
    state.rng_state = rng.bit_generator.state
    return state


def summarize(state: WalkState) -> WalkSummary:
    N = state.steps_done
    totals = np.array(state.totals)
    mean = totals / (N + 1)
    full = [i for i, sz in enumerate(state.batch_sizes) if sz == state.batch]
    if len(full) >= 2:
        bm = np.array([state.batch_sums[i] for i in full]) / state.batch
        se = bm.std(axis=0, ddof=1) / math.sqrt(len(full))
    else:
        se = np.full(kernel.N_OBS, math.nan)
    n = len(state.alpha)
    final = ChartPoint(n, state.alpha, state.beta, state.gamma)
    return WalkSummary(N, dict(zip(OBS_NAMES, mean.tolist())), dict(zip(OBS_NAMES, se.tolist())),
                       state.rejected, final, state)


def orbit_walk(p: ChartPoint, twists: Sequence[TwistSpec], steps: int, rng_seed=None, batch: int = DEFAULT_BATCH) -> WalkSummary:
    """Uniform random composition of the twists and their inverses, with batch-means error bars."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    st = start_walk(p, twists, rng_seed, batch)
    advance(st, steps)
    return summarize(st)


def goldman_reference(alpha, count: int, rng_seed=None) -> tuple[dict, dict]:
    """Monte Carlo means and standard errors of the battery under chart Lebesgue measure."""
    beta, gamma, _ = goldman_batch(alpha, count, rng_seed)
    vals = observables(beta, gamma, alpha)
    mean = vals.mean(axis=0)
    se = vals.std(axis=0, ddof=1) / math.sqrt(count)
    return dict(zip(OBS_NAMES, mean.tolist())), dict(zip(OBS_NAMES, se.tolist()))


def agreement(walk: WalkSummary, ref_mean: dict, ref_se: dict, k: float = 3.0) -> dict:
    """Per observable: whether |walk - reference| is within k combined standard errors."""
    out = {}
    for name in OBS_NAMES:
        comb = math.sqrt(walk.stderr[name] ** 2 + ref_se[name] ** 2)
        out[name] = abs(walk.mean[name] - ref_mean[name]) <= k * comb
    return out
