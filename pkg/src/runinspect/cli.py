"""
Command line front end: seeded benchmark experiments with CSV/JSON output.

Each subcommand runs one experiment family end to end and writes its
per-trial or per-iteration data as CSV (header row, RFC-4180, floats in
repr form so identical seeds and flags give byte-identical files) plus a
JSON summary carrying the flags, seed, oracle evaluation counts, escape
statistics, and wall time. Output lands in --out, else $RUNINSPECT_OUT,
else ./runinspect_out.

Trial RNG streams are derived from (master seed, trial index), so any
subset of trials is reproducible in isolation and aggregation order
never matters.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path
from typing import Optional

import numpy as np

from runinspect.core import BlockSpec
from runinspect.inspection import InspectionPolicy
from runinspect.meta import run_and_inspect
from runinspect.problems import (
    ACKLEY_GLOBAL_MIN_VALUE,
    QuadSineParams,
    cs_instance,
    cs_objective,
    gaussian_clusters,
    kmeans_objective,
    load_iris,
    logreg_instance,
    logreg_objective,
    logreg_test_error,
    modified_ackley,
    quad_sine,
    robust_reg_instance,
    tukey_objective,
)
from runinspect.runners import (
    RunnerConfig,
    block_coordinate_descent,
    cd_half_threshold,
    em_kmeans,
    gradient_descent,
    irls_tukey,
    iterative_half_thresholding,
    prox_linear_mcp,
)

OUT_ENV = "RUNINSPECT_OUT"
PI = float(np.pi)

# Magnitude above which a recovered coordinate counts as an identified
# nonzero in the sparse-recovery statistics (our convention; it also
# names the support-ratio CSV column).
SUPPORT_THRESHOLD = 1e-3

_KMEANS_K = {"gauss": 4, "iris": 3}

# Contour-figure sampling box for the robust-regression loss surface:
# (intercept lo, hi), (slope lo, hi), grid step.
_SURFACE_B0 = (-2.0, 8.0)
_SURFACE_B1 = (-3.0, 5.0)
_SURFACE_STEP = 0.1


# ---------------------------------------------------------------------------
# Output helpers


def _out_dir(arg: Optional[str]) -> Path:
    base = arg or os.environ.get(OUT_ENV) or "runinspect_out"
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _jsonable(v):
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_jsonable(t) for t in v]
    if isinstance(v, Path):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(t) for t in v]
    if isinstance(v, dict):
        return {k: _jsonable(t) for k, t in v.items()}
    return v


def _flags(args: argparse.Namespace) -> dict:
    skip = {"func", "cmd"}
    return {k: _jsonable(v) for k, v in vars(args).items() if k not in skip}


def _escape_summary(events) -> dict:
    radii = [e.radius for e in events]
    return {
        "count": len(events),
        "mean_radius": float(np.mean(radii)) if radii else None,
        "total_samples_consumed": int(sum(e.samples_consumed for e in events)),
    }


def _write_summary(path: Path, args, seed, counts, escapes, wall, **extra) -> None:
    payload = {
        "subcommand": args.cmd,
        "flags": _flags(args),
        "seed": seed,
        "value_evals": int(counts[0]),
        "block_evals": int(counts[1]),
        "escapes": _jsonable(escapes),
        "wall_time_s": wall,
    }
    payload.update({k: _jsonable(v) for k, v in extra.items()})
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _trace_rows(trace):
    """(phase, k, point..., value) rows; requires recorded points."""
    if not trace.has_points:
        raise RuntimeError("trace carries no points; enable record_points")
    for (phase, k, value), point in zip(trace.iterates, trace.points):
        yield (phase, k, *point, value)


def _check_escape_descent(trace, nu: float) -> None:
    for e in trace.escape_events:
        if not e.value_after < e.value_before - nu:
            raise RuntimeError(
                f"escape at outer {e.outer_iter} gained only "
                f"{e.value_before - e.value_after}, below the threshold {nu}"
            )


def _run_iterations(trace) -> int:
    """Descent steps in a stitched trace (initial-value rows excluded)."""
    run_rows = sum(1 for phase, _, _ in trace.iterates if phase == "run")
    return run_rows - (len(trace.escape_events) + 1)


# ---------------------------------------------------------------------------
# quad-sine


def cmd_quad_sine(args) -> int:
    t0 = time.perf_counter()
    out = _out_dir(args.out)
    oracle = quad_sine(QuadSineParams(args.a, args.b))
    config = RunnerConfig(step_size=args.step, record_points=True)
    policy = InspectionPolicy(R=args.R, dR=args.dR, nu=args.nu, sampler="line1d")
    x, trace, cert = run_and_inspect(
        lambda p: gradient_descent(oracle, p, config),
        oracle,
        np.array([args.x0]),
        policy,
    )
    _check_escape_descent(trace, args.nu)
    _write_csv(out / "quad_sine_trace.csv", ["phase", "k", "x", "F"], _trace_rows(trace))
    _write_summary(
        out / "quad_sine_summary.json",
        args,
        None,
        (trace.value_evals, trace.block_evals),
        _escape_summary(trace.escape_events),
        time.perf_counter() - t0,
        final_x=float(x[0]),
        final_abs_x=abs(float(x[0])),
        final_value=trace.final_value,
        status=trace.status,
        certified=cert is not None,
        certificate_samples=None if cert is None else cert.samples_evaluated,
    )
    if cert is None:
        print(f"quad-sine: no certificate (status {trace.status})", file=sys.stderr)
        return 2
    print(
        f"quad-sine: certified at x={float(x[0])!r}, F={trace.final_value!r}, "
        f"{len(trace.escape_events)} escapes -> {out}"
    )
    return 0


# ---------------------------------------------------------------------------
# ackley


def cmd_ackley(args) -> int:
    t0 = time.perf_counter()
    out = _out_dir(args.out)
    oracle = modified_ackley()
    rng = np.random.default_rng(args.seed)
    x0 = -8.0 + 16.0 * rng.random(2)
    config = RunnerConfig(step_size=args.step, record_points=True)
    if args.mode == "gd2d":
        policy = InspectionPolicy(
            R=args.R, dR=args.dR, nu=args.nu, sampler="ring2d", dtheta=args.dtheta
        )
        run = lambda p: gradient_descent(oracle, p, config)
        blocks = None
    else:  # bcd1d: one block per coordinate, 1-D line inspection
        blocks = BlockSpec.uniform(2, 1)
        policy = InspectionPolicy(R=args.R, dR=args.dR, nu=args.nu, sampler="line1d")
        run = lambda p: block_coordinate_descent(oracle, blocks, p, config)
    x, trace, cert = run_and_inspect(run, oracle, x0, policy, blocks=blocks)
    _check_escape_descent(trace, args.nu)
    _write_csv(
        out / "ackley_trajectory.csv",
        ["phase", "k", "x", "y", "F"],
        _trace_rows(trace),
    )
    gap = trace.final_value - ACKLEY_GLOBAL_MIN_VALUE
    _write_summary(
        out / "ackley_summary.json",
        args,
        args.seed,
        (trace.value_evals, trace.block_evals),
        _escape_summary(trace.escape_events),
        time.perf_counter() - t0,
        x0=x0,
        final_point=x,
        final_value=trace.final_value,
        grid_oracle_value=ACKLEY_GLOBAL_MIN_VALUE,
        gap_to_grid_oracle=gap,
        status=trace.status,
        certified=cert is not None,
    )
    print(
        f"ackley[{args.mode}]: F={trace.final_value!r} "
        f"(grid oracle {ACKLEY_GLOBAL_MIN_VALUE!r}, gap {gap:.3e}), "
        f"{len(trace.escape_events)} escapes -> {out}"
    )
    return 0 if cert is not None else 2


# ---------------------------------------------------------------------------
# kmeans


def _kmeans_policy(args, dataset: str) -> InspectionPolicy:
    if dataset == "gauss":
        return InspectionPolicy(
            R=args.R, dR=args.dR, nu=args.nu, sampler="ring2d", dtheta=args.dtheta
        )
    return InspectionPolicy(
        R=args.R,
        dR=args.dR,
        nu=args.nu,
        sampler="polar4d",
        dtheta=(args.dtheta, args.dtheta),
    )


def cmd_kmeans(args) -> int:
    t0 = time.perf_counter()
    out = _out_dir(args.out)
    dataset = args.dataset
    if args.trials is None:
        args.trials = 20 if dataset == "gauss" else 500
    if args.R is None:
        args.R = 10.0 if dataset == "gauss" else 3.0
    if args.dR is None:
        args.dR = 2.0 if dataset == "gauss" else 1.0
    if args.nu is None:
        args.nu = 0.1 if dataset == "gauss" else 1e-3
    if args.init is None:
        args.init = "adversarial" if dataset == "gauss" else "random"
    if dataset == "gauss":
        data = gaussian_clusters(args.seed)
    else:
        data = load_iris(args.iris_path)
    K = _KMEANS_K[dataset]
    policy = _kmeans_policy(args, dataset)
    config = RunnerConfig()
    rows = []
    value_evals = block_evals = 0
    all_events = []
    em_vals = []
    ri_vals = []
    for t in range(args.trials):
        rng = np.random.default_rng((args.seed, t))
        if args.init == "adversarial":
            # all centers inside the first mixture component's point range
            pool = min(len(data), 1000)
            idx = rng.choice(pool, size=K, replace=False)
        else:
            idx = rng.choice(len(data), size=K, replace=False)
        z0 = data[idx].ravel()
        oracle = kmeans_objective(data, K)
        plain = em_kmeans(data, K, z0, config)
        x, trace, cert = run_and_inspect(
            lambda p: em_kmeans(data, K, p, config), oracle, z0, policy
        )
        _check_escape_descent(trace, args.nu)
        radii = [e.radius for e in trace.escape_events]
        rows.append(
            (
                t,
                plain.final_value,
                trace.final_value,
                len(trace.escape_events),
                float(np.mean(radii)) if radii else None,
                cert is not None,
            )
        )
        em_vals.append(plain.final_value)
        ri_vals.append(trace.final_value)
        value_evals += trace.value_evals
        block_evals += trace.block_evals
        all_events.extend(trace.escape_events)
    _write_csv(
        out / "kmeans_trials.csv",
        [
            "trial",
            "em_objective",
            "inspected_objective",
            "escapes",
            "mean_escape_radius",
            "certified",
        ],
        rows,
    )
    em_vals = np.array(em_vals)
    ri_vals = np.array(ri_vals)
    _write_summary(
        out / "kmeans_summary.json",
        args,
        args.seed,
        (value_evals, block_evals),
        _escape_summary(all_events),
        time.perf_counter() - t0,
        K=K,
        n_points=len(data),
        em_mean=em_vals.mean(),
        em_min=em_vals.min(),
        em_max=em_vals.max(),
        inspected_mean=ri_vals.mean(),
        inspected_min=ri_vals.min(),
        inspected_max=ri_vals.max(),
    )
    print(
        f"kmeans[{dataset}]: {args.trials} trials, EM mean {em_vals.mean():.4f} "
        f"-> inspected mean {ri_vals.mean():.4f}, "
        f"{len(all_events)} escapes -> {out}"
    )
    return 0


# ---------------------------------------------------------------------------
# robust-reg


def cmd_robust_reg(args) -> int:
    t0 = time.perf_counter()
    out = _out_dir(args.out)
    X, y, beta_true = robust_reg_instance(args.seed)
    oracle = tukey_objective(X, y, args.r0)
    config = RunnerConfig(record_points=True)
    beta0 = np.zeros(2)
    plain = irls_tukey(X, y, beta0, args.r0, config)
    policy = InspectionPolicy(
        R=args.R, dR=args.dR, nu=args.nu, sampler="ring2d", dtheta=args.dtheta
    )
    b, trace, cert = run_and_inspect(
        lambda p: irls_tukey(X, y, p, args.r0, config), oracle, beta0, policy
    )
    _check_escape_descent(trace, args.nu)
    if trace.final_value > plain.final_value + 1e-12:
        raise RuntimeError(
            "inspection ended above the plain IRLS loss; the orchestrator "
            "only ever accepts improvements, so this is a bug"
        )
    _write_csv(
        out / "robust_reg_path.csv",
        ["phase", "k", "intercept", "slope", "loss"],
        _trace_rows(trace),
    )
    g0 = np.arange(_SURFACE_B0[0], _SURFACE_B0[1] + _SURFACE_STEP / 2, _SURFACE_STEP)
    g1 = np.arange(_SURFACE_B1[0], _SURFACE_B1[1] + _SURFACE_STEP / 2, _SURFACE_STEP)
    B0, B1 = np.meshgrid(g0, g1, indexing="ij")
    grid = np.column_stack((B0.ravel(), B1.ravel()))
    losses = oracle.batch_fn(grid)
    _write_csv(
        out / "robust_reg_surface.csv",
        ["intercept", "slope", "loss"],
        ((p[0], p[1], v) for p, v in zip(grid, losses)),
    )
    _write_summary(
        out / "robust_reg_summary.json",
        args,
        args.seed,
        (trace.value_evals, trace.block_evals),
        _escape_summary(trace.escape_events),
        time.perf_counter() - t0,
        beta_true=beta_true,
        beta_plain=plain.final_point,
        loss_plain=plain.final_value,
        beta_inspected=b,
        loss_inspected=trace.final_value,
        certified=cert is not None,
        status=trace.status,
    )
    print(
        f"robust-reg: IRLS loss {plain.final_value!r} -> inspected "
        f"{trace.final_value!r}, beta {np.round(b, 4).tolist()} -> {out}"
    )
    return 0


# ---------------------------------------------------------------------------
# cs


def _cs_stats(x: np.ndarray, inst, objective_fn) -> tuple:
    true_support = np.flatnonzero(inst.x_true)
    found = np.abs(x[true_support]) > SUPPORT_THRESHOLD
    return float(found.mean()), bool(found.all()), float(objective_fn(x))


def cmd_cs(args) -> int:
    t0 = time.perf_counter()
    out = _out_dir(args.out)
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    known = {"half", "cd", "cdi"}
    for a in algos:
        if a not in known:
            raise SystemExit(f"unknown algo {a!r}; choose from half, cd, cdi")
    policy = InspectionPolicy(
        R=args.R,
        dR=args.dR,
        nu=args.nu,
        sampler="ring2d",
        dtheta=args.dtheta,
        block_rule="sparse-pairs",
    )
    config = RunnerConfig()
    rows = []
    per_algo = {a: {"ratio": [], "all": 0, "below": 0, "obj": []} for a in algos}
    value_evals = block_evals = 0
    all_events = []
    for t in range(args.trials):
        inst = cs_instance(args.m, (args.seed, t), args.lam)
        oracle = cs_objective(inst)
        true_obj = oracle.fn(inst.x_true)
        x0 = np.zeros(2 * args.m)
        finals = {}
        escapes = {}
        for a in algos:
            if a == "half":
                tr = iterative_half_thresholding(inst.A, inst.b, args.lam, x0, config)
                finals[a] = tr.final_point
                escapes[a] = 0
            elif a == "cd":
                tr = cd_half_threshold(inst.A, inst.b, args.lam, x0, config)
                finals[a] = tr.final_point
                escapes[a] = 0
            else:
                x, trace, cert = run_and_inspect(
                    lambda p: cd_half_threshold(inst.A, inst.b, args.lam, p, config),
                    oracle,
                    x0,
                    policy,
                )
                _check_escape_descent(trace, args.nu)
                finals[a] = x
                escapes[a] = len(trace.escape_events)
                value_evals += trace.value_evals
                block_evals += trace.block_evals
                all_events.extend(trace.escape_events)
        for a in algos:
            ratio, all_found, obj = _cs_stats(finals[a], inst, oracle.fn)
            per_algo[a]["ratio"].append(ratio)
            per_algo[a]["all"] += all_found
            per_algo[a]["below"] += obj < true_obj
            per_algo[a]["obj"].append(obj)
            rows.append(
                (
                    t,
                    a,
                    obj,
                    true_obj,
                    ratio,
                    all_found,
                    obj < true_obj,
                    escapes[a],
                )
            )
    _write_csv(
        out / "cs_trials.csv",
        [
            "trial",
            "algo",
            "objective",
            "true_signal_objective",
            f"support_ratio_at_{SUPPORT_THRESHOLD!r}",
            "all_nonzeros_identified",
            "below_true_objective",
            "escapes",
        ],
        rows,
    )
    table = {
        a: {
            "a_support_ratio": float(np.mean(st["ratio"])),
            "b_all_identified": st["all"],
            "c_below_true_objective": st["below"],
            "ave_obj": float(np.mean(st["obj"])),
        }
        for a, st in per_algo.items()
    }
    _write_summary(
        out / "cs_summary.json",
        args,
        args.seed,
        (value_evals, block_evals),
        _escape_summary(all_events),
        time.perf_counter() - t0,
        n=2 * args.m,
        support_threshold=SUPPORT_THRESHOLD,
        table=table,
    )
    for a in algos:
        st = table[a]
        print(
            f"cs[m={args.m}] {a:>4}: a={st['a_support_ratio']:.2%} "
            f"b={st['b_all_identified']} c={st['c_below_true_objective']} "
            f"ave obj={st['ave_obj']:.4f}"
        )
    print(f"-> {out}")
    return 0


# ---------------------------------------------------------------------------
# logreg


def cmd_logreg(args) -> int:
    t0 = time.perf_counter()
    out = _out_dir(args.out)
    policy = InspectionPolicy(
        R=args.R,
        dR=args.dR,
        nu=args.nu,
        sampler="ring2d",
        dtheta=args.dtheta,
        block_rule="sparse-pairs",
    )
    # eps_stag sits inside the descent's oscillation band so the prox-linear
    # runner halts while still far from its eventual fixed point; inspection
    # then has real escapes to find.  Tighter values let the long transient
    # play out and both variants land on the same critical point.
    config = RunnerConfig(step_size=args.step, eps_stag=args.eps_stag, max_iters=20_000)
    rows = []
    agg = {"pl": {"obj": [], "err": [], "iters": []}, "pli": {"obj": [], "err": [], "iters": [], "inspections": []}}
    value_evals = block_evals = 0
    all_events = []
    for t in range(args.trials):
        inst = logreg_instance(args.K, args.eps, (args.seed, t))
        oracle = logreg_objective(inst, args.lam, args.gamma)
        theta0 = np.zeros(inst.X.shape[1])

        def run(p):
            return prox_linear_mcp(
                (inst.X, inst.y),
                inst.beta_weight,
                args.lam,
                args.gamma,
                args.step,
                p,
                config,
            )

        plain = run(theta0)
        pl_obj = plain.final_value
        pl_err = logreg_test_error(inst, plain.final_point)
        pl_iters = plain.n_iterations - 1
        theta, trace, cert = run_and_inspect(run, oracle, theta0, policy)
        _check_escape_descent(trace, args.nu)
        pli_obj = trace.final_value
        pli_err = logreg_test_error(inst, theta)
        pli_iters = _run_iterations(trace)
        inspections = len(trace.escape_events) + (1 if cert is not None else 0)
        rows.append(
            (
                t,
                pl_obj,
                pl_err,
                pl_iters,
                pli_obj,
                pli_err,
                pli_iters,
                inspections,
                len(trace.escape_events),
            )
        )
        agg["pl"]["obj"].append(pl_obj)
        agg["pl"]["err"].append(pl_err)
        agg["pl"]["iters"].append(pl_iters)
        agg["pli"]["obj"].append(pli_obj)
        agg["pli"]["err"].append(pli_err)
        agg["pli"]["iters"].append(pli_iters)
        agg["pli"]["inspections"].append(inspections)
        value_evals += trace.value_evals
        block_evals += trace.block_evals
        all_events.extend(trace.escape_events)
    _write_csv(
        out / "logreg_trials.csv",
        [
            "trial",
            "pl_objective",
            "pl_test_error",
            "pl_iterations",
            "pli_objective",
            "pli_test_error",
            "pli_iterations",
            "pli_inspections",
            "pli_escapes",
        ],
        rows,
    )
    # population variance, matching a plain second-moment summary
    cells = {
        name: {
            "objective_mean": float(np.mean(st["obj"])),
            "objective_var": float(np.var(st["obj"])),
            "test_error_mean": float(np.mean(st["err"])),
            "test_error_var": float(np.var(st["err"])),
            "iterations_mean": float(np.mean(st["iters"])),
        }
        for name, st in agg.items()
    }
    cells["pli"]["inspections_mean"] = float(np.mean(agg["pli"]["inspections"]))
    _write_summary(
        out / "logreg_summary.json",
        args,
        args.seed,
        (value_evals, block_evals),
        _escape_summary(all_events),
        time.perf_counter() - t0,
        beta_weight=1.5 - 0.06 * args.K,
        cells=cells,
    )
    print(
        f"logreg[K={args.K}, eps={args.eps}]: "
        f"PL obj {cells['pl']['objective_mean']:.2f} err {cells['pl']['test_error_mean']:.2%} | "
        f"PLI obj {cells['pli']['objective_mean']:.2f} err {cells['pli']['test_error_mean']:.2%}"
        f" -> {out}"
    )
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="runinspect",
        description="Descent-plus-inspection experiments with seeded CSV/JSON output.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser(
        "quad-sine",
        help="1-D sine-perturbed quadratic: GD plus line inspection",
    )
    p.add_argument("--a", type=float, default=0.3, help="sine amplitude")
    p.add_argument("--b", type=float, default=3.0, help="sine frequency")
    p.add_argument("--x0", type=float, default=5.0, help="start point")
    p.add_argument("--R", type=float, default=0.7, help="inspection radius")
    p.add_argument("--dR", type=float, default=0.1, help="ring decrement")
    p.add_argument("--nu", type=float, default=1e-4, help="descent threshold")
    p.add_argument("--step", type=float, default=1.0 / 40, help="GD step size")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_quad_sine)

    p = sub.add_parser(
        "ackley",
        help="2-D irregular landscape: GD+ring or BCD+line inspection",
    )
    p.add_argument("--mode", choices=("gd2d", "bcd1d"), default="gd2d")
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--dR", type=float, default=0.2)
    p.add_argument("--dtheta", type=float, default=PI / 10, help="angle step")
    p.add_argument("--nu", type=float, default=1e-4)
    p.add_argument("--step", type=float, default=1.0 / 40)
    p.add_argument("--seed", type=int, default=0, help="start-point seed")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ackley)

    p = sub.add_parser(
        "kmeans",
        help="k-means with per-center ball inspection (gauss: 2-D rings, iris: two-angle rings)",
    )
    p.add_argument("--dataset", choices=("gauss", "iris"), required=True)
    p.add_argument("--trials", type=int, default=None, help="default 20 gauss / 500 iris")
    p.add_argument("--R", type=float, default=None, help="default 10 gauss / 3 iris")
    p.add_argument("--dR", type=float, default=None, help="default 2 gauss / 1 iris")
    p.add_argument("--dtheta", type=float, default=PI / 10)
    p.add_argument("--nu", type=float, default=None, help="default 0.1 gauss / 1e-3 iris")
    p.add_argument(
        "--init",
        choices=("random", "adversarial"),
        default=None,
        help="center init: random rows, or rows from one mixture component "
        "(default adversarial for gauss, random for iris)",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iris-path", default=None, help="external iris CSV (default: bundled)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_kmeans)

    p = sub.add_parser(
        "robust-reg",
        help="Tukey-loss line fit: IRLS plus 2-D ring inspection",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--R", type=float, default=5.0)
    p.add_argument("--dR", type=float, default=0.5)
    p.add_argument("--dtheta", type=float, default=PI / 10)
    p.add_argument("--nu", type=float, default=1e-3)
    p.add_argument("--r0", type=float, default=4.685, help="bisquare cutoff")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_robust_reg)

    p = sub.add_parser(
        "cs",
        help="sparse recovery with the half penalty: half / CD / CD+inspection",
    )
    p.add_argument("--m", type=int, choices=(25, 50, 100), default=25, help="measurements; n = 2m")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--lambda", dest="lam", type=float, default=0.05)
    p.add_argument("--algos", default="half,cd,cdi", help="comma list of half, cd, cdi")
    p.add_argument("--R", type=float, default=0.5)
    p.add_argument("--dR", type=float, default=0.05)
    p.add_argument("--dtheta", type=float, default=PI / 10)
    p.add_argument("--nu", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cs)

    p = sub.add_parser(
        "logreg",
        help="MCP-sparse logistic regression: prox-linear with/without inspection",
    )
    p.add_argument("--K", type=int, choices=(5, 10, 15), default=5, help="true nonzeros")
    p.add_argument("--eps", type=float, default=0.01, help="label noise level")
    p.add_argument("--trials", type=int, default=20, help="desk scale; the full table uses 100")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=5.0)
    p.add_argument("--step", type=float, default=0.5)
    p.add_argument(
        "--eps-stag",
        dest="eps_stag",
        type=float,
        default=0.7,
        help="theta-change tolerance at which prox-linear is declared stagnated",
    )
    p.add_argument("--R", type=float, default=5.0)
    p.add_argument("--dR", type=float, default=1.0)
    p.add_argument("--dtheta", type=float, default=PI / 10)
    p.add_argument("--nu", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_logreg)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
