"""Command-line entry point: `dtlab <command> [options]`.

Exit codes: 0 pass, 1 assertion failure, 2 usage error, 3 numerical instability.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import __version__
from .chain import check_regime
from .errors import DTLabError, NumericallyUnstable, RegimeViolation
from .io import atomic_write_text, csv_text

SCHEMA = "dtlab/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNSTABLE = 0, 1, 2, 3

log = logging.getLogger("dtlab")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Every option that shapes a run; persisted alongside results so the run can be repeated."""

    command: str
    options: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"command": self.command, **self.options}


# ---------------------------------------------------------------------------
# parsing helpers


def parse_alpha(text: str | None, n: int | None) -> tuple | None:
    if text is None:
        return None
    text = str(text).strip()
    if text.startswith("uniform:"):
        if n is None:
            raise UsageError("--alpha uniform:<value> needs --n")
        try:
            v = float(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad uniform alpha {text!r}") from None
        alpha = (v,) * n
    else:
        try:
            alpha = tuple(float(x) for x in text.split(",") if x.strip())
        except ValueError:
            raise UsageError(f"bad alpha list {text!r}") from None
        if n is not None and len(alpha) != n:
            raise UsageError(f"--alpha has {len(alpha)} entries but --n is {n}")
    if len(alpha) < 4:
        raise UsageError("need at least four punctures")
    if any(not (0.0 < a < 2 * math.pi) for a in alpha):
        raise UsageError("each alpha must lie in (0, 2pi)")
    try:
        check_regime(alpha)
    except RegimeViolation as exc:
        raise UsageError(str(exc)) from None
    return alpha


def parse_int_list(text: str) -> list:
    """'1-5' or '1,3,4'."""
    text = str(text)
    try:
        if "-" in text:
            a, b = text.split("-", 1)
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None


def _resolve_n(args, default: int | None = None) -> int:
    alpha_n = None
    if args.alpha and not str(args.alpha).startswith("uniform:"):
        alpha_n = len([x for x in str(args.alpha).split(",") if x.strip()])
    n = args.n if args.n is not None else (alpha_n or default)
    if n is None:
        raise UsageError("give --n or --alpha")
    if n < 4:
        raise UsageError("n must be at least 4")
    return n


def _alpha_for(args, n: int, rng):
    from .dynamics.sampler import random_alpha
    alpha = parse_alpha(args.alpha, n)
    return alpha if alpha is not None else random_alpha(n, rng)


def _emit(args, cfg: RunConfig, header, rows, summary: dict) -> None:
    if args.out:
        atomic_write_text(args.out, csv_text(header, rows))
    if args.json:
        payload = {"schema": SCHEMA, "config": cfg.to_json(), "seed": args.seed, "statistics": summary}
        atomic_write_text(args.json, json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(type(o))


def _pool_map(fn, tasks, threads: int):
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * threads))))


# ---------------------------------------------------------------------------
# commands


def cmd_verify(args, cfg: RunConfig) -> int:
    from .verify import CHECKS, run_battery
    only = args.checks.split(",") if args.checks else None
    if only:
        unknown = sorted(set(only) - set(CHECKS))
        if unknown:
            raise UsageError(f"unknown checks {unknown}; choose from {list(CHECKS)}")
    results = run_battery(args.seed, args.count, args.perturb, only)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    if failed:
        f = failed[0]
        print(f"first failure: {f.name} worst residual {f.worst:.3e} exceeds {f.tol:.1e}", file=sys.stderr)
    rows = [(r.name, r.passed, r.worst, r.tol, r.count) for r in results]
    _emit(args, cfg, ("check", "passed", "worst", "tol", "count"), rows,
          {"passed": not failed, "checks": [r.to_json() for r in results]})
    return EXIT_FAIL if failed else EXIT_OK


def _transversal_task(task):
    from .dynamics.sampler import random_alpha, random_regular_point, task_rng
    from .symplectic import certify, construct_transverse
    seed, tid, n, alpha = task
    rng = task_rng(seed, tid)
    if alpha is None:
        alpha = random_alpha(n, rng)
    p = random_regular_point(n, rng, alpha)
    try:
        fam = construct_transverse(p)
        cert = certify(p, fam)
    except DTLabError as exc:
        return {"task": tid, "ok": False, "error": f"{type(exc).__name__}: {exc}", "point": p.to_json()}
    return {
        "task": tid, "ok": cert.rank == n - 3, "rank": cert.rank, "off_pattern": cert.off_pattern(),
        "norm": float(np.linalg.norm(cert.matrix)), "kinds": "".join(fam.kinds),
        "curves": " ".join(str(w) for w in fam.curves), "certificate": cert.to_json(), "error": "",
    }


def cmd_transversal(args, cfg: RunConfig) -> int:
    n = _resolve_n(args, 4)
    alpha = parse_alpha(args.alpha, n)
    tasks = [(args.seed, t, n, alpha) for t in range(args.count)]
    results = _pool_map(_transversal_task, tasks, args.threads)
    tol = args.tol if args.tol is not None else 1e-6
    rows, bad = [], 0
    for r in results:
        if r["ok"]:
            ok = r["off_pattern"] <= tol
        else:
            ok = False
        bad += not ok
        rows.append((r["task"], n, r.get("rank", ""), r.get("off_pattern", ""), r.get("norm", ""),
                     r.get("kinds", ""), r.get("curves", ""), ok, r["error"]))
    print(f"{len(results) - bad}/{len(results)} certificates of rank {n - 3} with triangular pattern (tol {tol:g})")
    for r in results:
        if r["error"]:
            print(f"task {r['task']}: {r['error']}", file=sys.stderr)
    _emit(args, cfg, ("task", "n", "rank", "off_pattern", "norm", "kinds", "curves", "ok", "error"), rows,
          {"passed": bad == 0, "failures": bad, "certificates": [r.get("certificate") for r in results]})
    return EXIT_OK if bad == 0 else EXIT_FAIL


def _orbit_torus(args, cfg: RunConfig) -> int:
    from .dynamics.sampler import task_rng
    from .dynamics.torus import birkhoff_tolerance, torus_rotate
    d = args.dim
    if d < 1:
        raise UsageError("--dim must be positive")
    rng = task_rng(args.seed, 0)
    rot = 2 * math.pi * rng.random(d)
    x0 = 2 * math.pi * rng.random(d)
    orb = torus_rotate(x0, rot, args.steps)
    tol = birkhoff_tolerance(args.steps)
    disc_tol = args.tol if args.tol is not None else 0.02
    ok = orb.discrepancy < disc_tol and all(e <= tol for e in orb.errors.values())
    rows = [("discrepancy", L, "", v, "") for L, v in orb.dyadic]
    rows += [("birkhoff", args.steps, k, orb.birkhoff[k], orb.errors[k]) for k in orb.birkhoff]
    print(f"discrepancy {orb.discrepancy:.4g} at N={args.steps}; worst Birkhoff error "
          f"{max(orb.errors.values()):.3g} (bound {tol:.3g})")
    _emit(args, cfg, ("record", "length", "observable", "value", "error"), rows,
          {"passed": ok, "orbit": orb.to_json(), "birkhoff_bound": tol})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_orbit(args, cfg: RunConfig) -> int:
    if args.mode == "torus":
        return _orbit_torus(args, cfg)
    from .dynamics.sampler import random_regular_point, task_rng
    from .dynamics.walk import (
        OBS_NAMES, WalkState, advance, agreement, default_twists, goldman_reference, start_walk, summarize,
    )
    from .mcg import TwistSpec

    n = _resolve_n(args, 4)
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    alpha = _alpha_for(args, n, task_rng(args.seed, 0))
    if args.twists:
        twists = []
        for tok in args.twists.split(","):
            tok = tok.strip()
            try:
                if tok.startswith("b"):
                    twists.append(TwistSpec.pants(int(tok[1:])))
                elif tok.startswith("d"):
                    i, j = tok[1:].split(":")
                    twists.append(TwistSpec.pair(int(i), int(j)))
                else:
                    raise ValueError
                twists[-1].validate(n)
            except ValueError:
                raise UsageError(f"bad twist {tok!r}; use bK for pants curves and dI:J for c_i c_j") from None
    else:
        twists = default_twists(n)

    history = []
    if args.checkpoint and os.path.exists(args.checkpoint):
        with open(args.checkpoint) as fh:
            saved = json.load(fh)
        state = WalkState.from_json(saved["state"])
        history = saved.get("history", [])
        if tuple(state.alpha) != tuple(alpha) or [t.to_json() for t in state.twists] != [t.to_json() for t in twists]:
            raise UsageError("checkpoint was written for a different configuration")
        if state.steps_done > args.steps:
            raise UsageError(f"checkpoint already has {state.steps_done} steps, more than --steps")
        log.info("resuming from %s at step %d", args.checkpoint, state.steps_done)
    else:
        p = random_regular_point(n, task_rng(args.seed, 1), alpha)
        state = start_walk(p, twists, task_rng(args.seed, 2), args.batch)

    # fixed cadence so that a resumed run reports at the same steps as an uninterrupted one
    every = args.report_every or 10 * state.batch
    every = max(state.batch, (every // state.batch) * state.batch)
    while state.steps_done < args.steps:
        target = min(args.steps, (state.steps_done // every + 1) * every)
        advance(state, target - state.steps_done)
        if state.steps_done % every == 0:
            s = summarize(state)
            history += [[s.steps, k, s.mean[k], s.stderr[k]] for k in OBS_NAMES]
        if args.checkpoint:
            atomic_write_text(args.checkpoint, json.dumps({"state": state.to_json(), "history": history}))
    summary = summarize(state)
    stats = {"walk": summary.to_json(), "twists": [t.to_json() for t in twists], "alpha": list(alpha)}

    ok = True
    rows = [("walk", h[0], h[1], h[2], h[3]) for h in history]
    if not history or history[-1][0] != summary.steps:
        rows += [("walk", summary.steps, k, summary.mean[k], summary.stderr[k]) for k in OBS_NAMES]
    if args.reference > 0:
        ref_mean, ref_se = goldman_reference(alpha, args.reference, task_rng(args.seed, 3))
        agree = agreement(summary, ref_mean, ref_se, 3.0) if summary.steps >= 2 * state.batch else {}
        hits = sum(agree.values())
        ok = hits >= math.ceil(0.9 * len(OBS_NAMES))
        rows += [("reference", args.reference, k, ref_mean[k], ref_se[k]) for k in OBS_NAMES]
        stats.update({"reference_mean": ref_mean, "reference_se": ref_se, "agree": agree, "agree_count": hits})
        print(f"{hits}/{len(OBS_NAMES)} observables within 3 combined standard errors after {summary.steps} steps")
    else:
        print(f"walk of {summary.steps} steps, {summary.rejected} rejected moves")
    _emit(args, cfg, ("source", "steps", "observable", "mean", "stderr"), rows, {"passed": ok, **stats})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_scan(args, cfg: RunConfig) -> int:
    from .dynamics.sampler import random_regular_point, task_rng
    from .dynamics.scans import claim_scan_D1B2, eta_relation_check, upsilon_gamma_fit

    n = _resolve_n(args, 5)
    if args.grid < 1:
        raise UsageError("--grid must be positive")
    if args.kind == "d1b2" and n < 5:
        raise UsageError("the D1B2 scan needs n >= 5")
    if args.kind in ("fit", "eta") and not (2 <= args.i <= n - 2):
        raise UsageError(f"--i must lie in 2..{n - 2}")
    alpha = _alpha_for(args, n, task_rng(args.seed, 0))
    p = random_regular_point(n, task_rng(args.seed, 1), alpha)
    tol = args.tol if args.tol is not None else 1e-8
    if args.kind == "fit":
        rep = upsilon_gamma_fit(p, args.i, grid=args.grid)
        ok = rep.residuals["max_abs"] < tol and abs(rep.fit["k1"]) > 1e-6 and rep.fit["accepted"]
        print(f"k1={rep.fit['k1']:.12g} k2={rep.fit['k2']:.12g} residual={rep.residuals['max_abs']:.3e}")
    elif args.kind == "d1b2":
        rep = claim_scan_D1B2(p, args.variant, args.grid)
        step = rep.meta["grid_step"]
        ok = args.grid < 2 or (rep.residuals["max_zero_offset"] <= step and rep.residuals["max_missing"] <= step)
        print(f"bracket zeros {[round(z, 9) for z in rep.zeros['bracket']]} expected "
              f"{[round(z, 9) for z in rep.expected['bracket']]}; min separation "
              f"{rep.meta['separation_min']:.4g} at gamma_1={rep.zeros['separation_min_at'][0]:.9f}")
    else:
        rep = eta_relation_check(p, args.i, args.m, args.grid)
        ok = True
        print(f"min gap {rep.residuals['min_gap']:.4g}; relation holds at {rep.zeros['relation']}")
    _emit(args, cfg, ("scan", "grid_index", "parameter", "quantity", "value"), rep.rows(),
          {"passed": ok, "report": rep.to_json()})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_appendix(args, cfg: RunConfig) -> int:
    from .dynamics.appendix import APPENDIX_EQUATIONS, appendix_polynomial, identity_residuals, pair_config
    from .dynamics.sampler import random_regular_point, task_rng

    ms = parse_int_list(args.m)
    if not ms or min(ms) < 1:
        raise UsageError("--m must list positive integers")
    n = _resolve_n(args, 5)
    if n < 5:
        raise UsageError("the quadrilateral needs n >= 5")
    tol = args.tol if args.tol is not None else 1e-9
    rows, worst, poly_ok = [], dict.fromkeys(APPENDIX_EQUATIONS, 0.0), True
    table = []
    for t in range(args.count):
        rng = task_rng(args.seed, t)
        alpha = _alpha_for(args, n, rng)
        p = random_regular_point(n, rng, alpha)
        cfg_t = pair_config(p, 2 + t % (n - 3))
        res = identity_residuals(cfg_t)
        for k in APPENDIX_EQUATIONS:
            worst[k] = max(worst[k], res[k])
        if t < args.poly_count:
            for m in ms:
                pr = appendix_polynomial(cfg_t.constants(), m)
                good = pr.degree_residual < 1e-6 and pr.leading_rel_err < 1e-6 and pr.positive
                poly_ok &= good
                table.append(pr.to_json())
                for q in ("degree_residual", "leading_fd", "leading_closed", "leading_rel_err"):
                    rows.append((t, m, q, getattr(pr, q)))
                rows.append((t, m, "root_count", len(pr.roots_in_range)))
    rows += [("all", "", k, worst[k]) for k in APPENDIX_EQUATIONS]
    ident_ok = all(v <= tol for v in worst.values())
    for k in APPENDIX_EQUATIONS:
        print(f"{'PASS' if worst[k] <= tol else 'FAIL'} {k:<15} worst relative residual {worst[k]:.3e}")
    for m in ms:
        sub = [r for r in table if r["m"] == m]
        if sub:
            print(f"m={m}: leading coefficient min {min(r['leading_fd'] for r in sub):.4g}, max relative error "
                  f"{max(r['leading_rel_err'] for r in sub):.2e}, max degree residual {max(r['degree_residual'] for r in sub):.2e}")
    ok = ident_ok and poly_ok
    _emit(args, cfg, ("config", "m", "quantity", "value"), rows,
          {"passed": ok, "identities": worst, "polynomials": table})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sample(args, cfg: RunConfig) -> int:
    from .dynamics.sampler import goldman_batch, polytope_volume_qmc, task_rng
    n = _resolve_n(args, 4)
    if args.count < 1:
        raise UsageError("--count must be positive")
    alpha = _alpha_for(args, n, task_rng(args.seed, 0))
    beta, gamma, acc = goldman_batch(alpha, args.count, task_rng(args.seed, 1))
    qmc = polytope_volume_qmc(alpha, seed=args.seed)
    m = n - 3
    header = ("sample", *(f"beta_{k}" for k in range(1, m + 1)), *(f"gamma_{k}" for k in range(1, m + 1)))
    rows = [(s, *map(float, beta[s]), *map(float, gamma[s])) for s in range(args.count)]
    print(f"{args.count} samples; acceptance {acc:.4f}, quasi-Monte Carlo volume fraction {qmc:.4f}, "
          f"exact {1 / math.factorial(m):.4f}")
    _emit(args, cfg, header, rows, {"passed": True, "alpha": list(alpha), "acceptance": acc, "qmc_fraction": qmc})
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "transversal": cmd_transversal,
    "orbit": cmd_orbit,
    "scan": cmd_scan,
    "appendix": cmd_appendix,
    "sample": cmd_sample,
}


# ---------------------------------------------------------------------------
# argument parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML file of option values; command-line flags take precedence")
    p.add_argument("--n", type=int, help="number of punctures")
    p.add_argument("--alpha", help="cone angles: comma list or uniform:<value>")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, help="pass/fail tolerance override")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--json", help="JSON summary path")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dtlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dtlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the identity battery")
    _common(p)
    p.add_argument("--count", type=int, default=200, help="sample size per check")
    p.add_argument("--perturb", type=float, default=0.0, help="inject a fault of this size")
    p.add_argument("--checks", help="comma list restricting the checks")

    p = sub.add_parser("transversal", help="certify transverse pants decompositions at random points")
    _common(p)
    p.add_argument("--count", type=int, default=100, help="number of points")

    p = sub.add_parser("orbit", help="random twist walk, or a torus rotation with --mode torus")
    _common(p)
    p.add_argument("--mode", choices=("walk", "torus"), default="walk")
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--twists", help="comma list like b1,d2:3 (default: every pants twist and c_k c_{k+1} twist)")
    p.add_argument("--batch", type=int, default=10_000, help="batch length for standard errors")
    p.add_argument("--report-every", type=int, default=0, help="steps between progress rows (default 10 batches)")
    p.add_argument("--reference", type=int, default=200_000, help="Monte Carlo reference sample size, 0 to skip")
    p.add_argument("--checkpoint", help="walk state file; an existing file is resumed")
    p.add_argument("--dim", type=int, default=2, help="torus dimension for --mode torus")

    p = sub.add_parser("scan", help="one-parameter scans of angle coordinates")
    _common(p)
    p.add_argument("--kind", choices=("fit", "d1b2", "eta"), default="fit")
    p.add_argument("--variant", choices=("c2c3", "c1c3"), default="c2c3")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--i", type=int, default=2, help="first puncture of the pair c_i c_{i+1}")
    p.add_argument("--m", type=int, default=1, help="twist power for --kind eta")

    p = sub.add_parser("appendix", help="quadrilateral identities and the degree 2m+4 polynomial")
    _common(p)
    p.add_argument("--m", default="1-5", help="powers, e.g. 1-5 or 1,3")
    p.add_argument("--count", type=int, default=1000, help="configurations for the identity suite")
    p.add_argument("--poly-count", type=int, default=20, help="configurations for the polynomial checks")

    p = sub.add_parser("sample", help="Lebesgue samples in the action-angle chart")
    _common(p)
    p.add_argument("--count", type=int, default=1000)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        with open(args.config) as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a mapping")
    # a command-specific block overrides top-level keys
    section = data.get(args.command, {})
    merged = {k: v for k, v in data.items() if not isinstance(v, dict)}
    if isinstance(section, dict):
        merged.update(section)
    known = vars(args)
    unknown = sorted(k for k in merged if k.replace("-", "_") not in known)
    if unknown:
        raise UsageError(f"unknown config keys {unknown}")
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    subparser.set_defaults(**{k.replace("-", "_"): v for k, v in merged.items()})
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    except UsageError as exc:
        print(f"dtlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.threads < 1:
        print("dtlab: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    opts = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "config", "out", "json", "verbose")}
    cfg = RunConfig(args.command, opts)
    try:
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"dtlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RegimeViolation, ValueError) as exc:
        print(f"dtlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericallyUnstable as exc:
        print(f"dtlab: numerical instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except DTLabError as exc:
        print(f"dtlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
