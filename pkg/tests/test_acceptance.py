"""Acceptance gate: each numbered check prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as
they complete. Every check pins its tolerances and runtime budgets in
the assertions; nothing here is approximate beyond the stated bounds.
"""

import time

import numpy as np
import pytest

from runinspect.core import BlockSpec, ObjectiveOracle, finite_difference_gradient
from runinspect.inspection import InspectionPolicy, inspect_point
from runinspect.kernels import half_threshold_scalar
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
    prox_linear_mcp,
    scaled_mcp_prox,
)
from runinspect.theory import certify_decomposition, theorem3_global_radius

from .conftest import brute_force_scalar_min
from .test_theory import quad_sine_decomposition, square_wave_decomposition

SEED = 0
PI = float(np.pi)


def _line(num, name, ok, detail):
    print(f"\nACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'} ({detail})")


def _quad_sine_sweep(R):
    oracle = quad_sine(QuadSineParams(0.3, 3.0))
    config = RunnerConfig(step_size=1.0 / 40)
    policy = InspectionPolicy(R=R, dR=0.1, nu=1e-4, sampler="line1d")
    rng = np.random.default_rng(SEED)
    out = []
    for x0 in rng.uniform(-10.0, 10.0, size=100):
        x, trace, cert = run_and_inspect(
            lambda p: gradient_descent(oracle, p, config),
            oracle,
            np.array([x0]),
            policy,
        )
        out.append((float(x[0]), trace.final_value, cert is not None))
    return out


def test_01_escape_radius_above_critical():
    t0 = time.perf_counter()
    results = _quad_sine_sweep(R=0.7)
    wall = time.perf_counter() - t0
    n_global = sum(abs(x) <= 1e-3 and f <= 1e-6 for x, f, _ in results)
    ok = n_global == 100 and wall < 5.0
    _line(1, "sine-quadratic, R above critical", ok,
          f"{n_global}/100 at the global minimizer, {wall:.2f}s")
    assert n_global == 100
    assert wall < 5.0


def test_02_small_radius_negative_control():
    results = _quad_sine_sweep(R=0.2)
    stuck = sum(cert and f > 0.01 for _, f, cert in results)
    ok = stuck >= 1
    _line(2, "sine-quadratic, R below critical", ok,
          f"{stuck}/100 certified at a non-global minimizer")
    assert stuck >= 1


def test_03_irregular_2d_landscape():
    t0 = time.perf_counter()
    oracle = modified_ackley()
    # The step is chosen so descent overshoots out of every narrow trap
    # basin (their curvature exceeds 2/step) yet still converges in the
    # wide global basin; the patient guard lets that transient wander
    # instead of flagging it as divergence.
    config = RunnerConfig(step_size=0.1, patience=100, max_iters=3000)
    policy = InspectionPolicy(R=1.0, dR=0.2, nu=1e-4, sampler="ring2d", dtheta=PI / 10)
    rng = np.random.default_rng(SEED)
    hits = 0
    for _ in range(50):
        x0 = rng.uniform(-8.0, 8.0, size=2)
        x, trace, cert = run_and_inspect(
            lambda p: gradient_descent(oracle, p, config), oracle, x0, policy
        )
        hits += abs(trace.final_value - ACKLEY_GLOBAL_MIN_VALUE) <= 1e-3
    wall = time.perf_counter() - t0
    ok = hits >= 48 and wall < 60.0
    _line(3, "2-D irregular landscape", ok,
          f"{hits}/50 within 1e-3 of the grid optimum, {wall:.1f}s")
    assert hits >= 48  # 95% of 50
    assert wall < 60.0


def test_04_kmeans_gauss_adversarial():
    data = gaussian_clusters(SEED)
    K = 4
    config = RunnerConfig()
    oracle = kmeans_objective(data, K)
    rng = np.random.default_rng((SEED, 999))
    best = np.inf
    for _ in range(100):
        idx = rng.choice(len(data), size=K, replace=False)
        best = min(best, em_kmeans(data, K, data[idx].ravel(), config).final_value)
    policy = InspectionPolicy(R=10.0, dR=2.0, nu=0.1, sampler="ring2d", dtheta=PI / 10)
    bar = best * 1.01
    inspected_ok = 0
    plain_above = 0
    for t in range(20):
        rng_t = np.random.default_rng((SEED, t))
        idx = rng_t.choice(min(len(data), 1000), size=K, replace=False)
        z0 = data[idx].ravel()
        plain = em_kmeans(data, K, z0, config)
        x, trace, cert = run_and_inspect(
            lambda p: em_kmeans(data, K, p, config), oracle, z0, policy
        )
        inspected_ok += trace.final_value <= bar
        plain_above += plain.final_value > bar
    ok = inspected_ok == 20 and plain_above >= 1
    _line(4, "k-means, clustered data, adversarial inits", ok,
          f"inspected within 1% of restart oracle {best:.4f} in {inspected_ok}/20, "
          f"plain EM above in {plain_above}")
    assert inspected_ok == 20
    assert plain_above >= 1


def test_05_kmeans_iris():
    data = load_iris(None)
    K = 3
    config = RunnerConfig()
    oracle = kmeans_objective(data, K)
    policy = InspectionPolicy(
        R=3.0, dR=1.0, nu=1e-3, sampler="polar4d", dtheta=(PI / 10, PI / 10)
    )
    plain_above = 0
    inspected_good = 0
    for t in range(500):
        rng_t = np.random.default_rng((SEED, t))
        z0 = data[rng_t.choice(len(data), size=K, replace=False)].ravel()
        plain = em_kmeans(data, K, z0, config)
        x, trace, cert = run_and_inspect(
            lambda p: em_kmeans(data, K, p, config), oracle, z0, policy
        )
        plain_above += plain.final_value > 0.4
        inspected_good += trace.final_value <= 0.27
    ok = plain_above >= 25 and inspected_good >= 495
    _line(5, "k-means, iris", ok,
          f"plain EM above 0.4 in {plain_above}/500, "
          f"inspected at or below 0.27 in {inspected_good}/500")
    assert plain_above >= 25  # 5% of 500
    assert inspected_good >= 495  # 99% of 500


def test_06_sparse_recovery():
    t0 = time.perf_counter()
    lam = 0.05
    config = RunnerConfig()
    policy = InspectionPolicy(
        R=0.5, dR=0.05, nu=1e-6, sampler="ring2d", dtheta=PI / 10,
        block_rule="sparse-pairs",
    )
    ordered = 0
    ratios_cd = []
    ratios_cdi = []
    for t in range(100):
        inst = cs_instance(25, (SEED, t), lam)
        oracle = cs_objective(inst)
        x0 = np.zeros(50)
        cd = cd_half_threshold(inst.A, inst.b, lam, x0, config)
        x, trace, cert = run_and_inspect(
            lambda p: cd_half_threshold(inst.A, inst.b, lam, p, config),
            oracle,
            x0,
            policy,
        )
        ordered += trace.final_value <= cd.final_value + 1e-9
        support = np.flatnonzero(inst.x_true)
        ratios_cd.append(np.mean(np.abs(cd.final_point[support]) > 1e-3))
        ratios_cdi.append(np.mean(np.abs(x[support]) > 1e-3))
    wall = time.perf_counter() - t0
    margin = float(np.mean(ratios_cdi) - np.mean(ratios_cd))
    ok = ordered >= 95 and margin >= 0.10 and wall < 300.0
    _line(6, "sparse recovery, m=25", ok,
          f"ordering held in {ordered}/100, support-ratio margin "
          f"{margin * 100:.1f}pp, {wall:.1f}s")
    assert ordered >= 95
    assert margin >= 0.10
    assert wall < 300.0


def test_07_sparse_logistic_regression():
    K, eps, lam, gamma, step = 5, 0.01, 1.0, 5.0, 0.5
    config = RunnerConfig(step_size=step, eps_stag=0.7, max_iters=20_000)
    policy = InspectionPolicy(
        R=5.0, dR=1.0, nu=1e-3, sampler="ring2d", dtheta=PI / 10,
        block_rule="sparse-pairs",
    )
    pl_obj, pl_err, pli_obj, pli_err = [], [], [], []
    for t in range(20):
        inst = logreg_instance(K, eps, (SEED, t))
        oracle = logreg_objective(inst, lam, gamma)
        theta0 = np.zeros(inst.X.shape[1])

        def run(p):
            return prox_linear_mcp(
                (inst.X, inst.y), inst.beta_weight, lam, gamma, step, p, config
            )

        plain = run(theta0)
        pl_obj.append(plain.final_value)
        pl_err.append(logreg_test_error(inst, plain.final_point))
        theta, trace, cert = run_and_inspect(run, oracle, theta0, policy)
        pli_obj.append(trace.final_value)
        pli_err.append(logreg_test_error(inst, theta))
    obj_ok = np.mean(pli_obj) < np.mean(pl_obj)
    err_ok = np.mean(pli_err) < np.mean(pl_err)
    ok = obj_ok and err_ok
    _line(7, "sparse logistic regression", ok,
          f"objective {np.mean(pl_obj):.2f} -> {np.mean(pli_obj):.2f}, "
          f"test error {np.mean(pl_err):.2%} -> {np.mean(pli_err):.2%}")
    assert obj_ok
    assert err_ok


def test_08_oracle_equivalence():
    rng = np.random.default_rng(SEED)
    # scalar prox maps vs dense 1-D search, 200 cases each
    half_bad = 0
    for _ in range(200):
        z = float(rng.uniform(-3, 3))
        lam = float(rng.uniform(0.01, 0.5))
        got = half_threshold_scalar(z, lam)
        g = lambda x: 0.5 * (x - z) ** 2 + lam * np.sqrt(abs(x))
        bf = brute_force_scalar_min(g, -abs(z) - 1, abs(z) + 1)
        if abs(got - bf) > 1e-4 and g(got) > g(bf) + 1e-8:
            half_bad += 1
    mcp_bad = 0
    for i in range(200):
        z = float(rng.uniform(-8, 8))
        lam = float(rng.uniform(0.1, 2.0))
        gamma = float(rng.uniform(1.5, 6.0))
        c = float(rng.uniform(0.1, 2.0)) if i % 2 else float(rng.uniform(gamma, 2 * gamma))
        got = scaled_mcp_prox(z, lam, gamma, c)
        from runinspect.runners import mcp_penalty

        g = lambda x: 0.5 * (x - z) ** 2 + c * mcp_penalty(np.array([x]), lam, gamma)
        bf = brute_force_scalar_min(g, -abs(z) - 1, abs(z) + 1)
        if abs(got - bf) > 1e-4 and g(got) > g(bf) + 1e-8:
            mcp_bad += 1

    # analytic gradients vs finite differences
    X, y, _ = robust_reg_instance(SEED)
    grad_cases = [
        (quad_sine(), [np.array([0.37]), np.array([-2.2])]),
        (modified_ackley(), [np.array([0.5, -1.3]), np.array([3.1, 2.2])]),
        (tukey_objective(X, y), [np.zeros(2), np.array([1.0, 2.0])]),
    ]
    grad_worst = 0.0
    for oracle, points in grad_cases:
        for p in points:
            fd = finite_difference_gradient(oracle, p, h=1e-6)
            rel = np.linalg.norm(oracle.grad(p) - fd) / max(1.0, np.linalg.norm(fd))
            grad_worst = max(grad_worst, rel)

    # monotone descent for every runner family
    def _drops(values):
        v = np.asarray(values)
        return bool(np.all(np.diff(v) <= 1e-12))

    qs = quad_sine()
    mono = _drops(gradient_descent(qs, [4.0], RunnerConfig(step_size=1.0 / 40)).values)
    ak = modified_ackley()
    mono &= _drops(
        block_coordinate_descent(
            ak, BlockSpec.uniform(2, 1), [3.0, -2.0], RunnerConfig(step_size=1.0 / 40)
        ).values
    )
    data = gaussian_clusters(SEED)[:400]
    mono &= _drops(em_kmeans(data, 4, data[:4].ravel(), RunnerConfig()).values)
    mono &= _drops(irls_tukey(X, y, np.zeros(2)).values)
    inst = cs_instance(25, SEED, 0.05)
    mono &= _drops(cd_half_threshold(inst.A, inst.b, 0.05, np.zeros(50)).values)

    # block evaluation consistency against substitution
    from runinspect.core import evaluate, evaluate_indices, substitute

    block_worst = 0.0
    block_oracles = (
        cs_objective(inst),
        kmeans_objective(data, 4),
        tukey_objective(X, y),
        logreg_objective(logreg_instance(5, 0.01, SEED), 1.0, 5.0),
    )
    for oracle in block_oracles:
        rng_b = np.random.default_rng(SEED + 1)
        for _ in range(25):
            x = rng_b.standard_normal(oracle.dim)
            k = int(rng_b.integers(1, min(oracle.dim, 4) + 1))
            idx = rng_b.choice(oracle.dim, size=k, replace=False)
            z = rng_b.standard_normal(k)
            got = evaluate_indices(oracle, x, idx, z)
            want = evaluate(oracle, substitute(x, idx, z))
            block_worst = max(block_worst, abs(got - want) / (1.0 + abs(want)))

    ok = (half_bad == 0 and mcp_bad == 0 and grad_worst <= 1e-4 and mono
          and block_worst <= 1e-10)
    _line(8, "oracle equivalence", ok,
          f"prox mismatches {half_bad}+{mcp_bad}/400, grad rel {grad_worst:.2e}, "
          f"monotone {mono}, block rel {block_worst:.2e}")
    assert half_bad == 0
    assert mcp_bad == 0
    assert grad_worst <= 1e-4
    assert mono
    assert block_worst <= 1e-10


def test_09_theory_certification():
    oracle = quad_sine(QuadSineParams(0.3, 3.0))
    config = RunnerConfig(step_size=1.0 / 40)
    policy = InspectionPolicy(R=0.7, dR=0.1, nu=1e-4, sampler="line1d")
    certified = []
    for x0 in (-6.0, 2.5, 5.0, 8.5):
        x, trace, cert = run_and_inspect(
            lambda p: gradient_descent(oracle, p, config), oracle, [x0], policy
        )
        assert cert is not None
        certified.append((x, cert))
    reports = []
    for param in ("lipschitz", "bounded"):
        d = quad_sine_decomposition(param)
        for x, cert in certified:
            reports.append(certify_decomposition(d, x, R=cert.radii[0]))
    sw = square_wave_decomposition()
    cert = inspect_point(
        sw.oracle(), [0.0], InspectionPolicy(R=1.0, dR=0.1, nu=1e-3, sampler="line1d")
    )
    assert cert is not None
    reports.append(certify_decomposition(sw, [0.0], R=1.0))
    all_pass = all(r.grad_ok and r.gap_ok and r.passed for r in reports)

    # the theorem-3 radius leaves only the global minimizer certifiable
    d = quad_sine_decomposition("bounded")
    R3 = theorem3_global_radius(d.mu, d.L, d.alpha, d.beta, d.M)
    policy3 = InspectionPolicy(R=float(R3), dR=0.1, nu=1e-4, sampler="line1d")
    global_hits = 0
    for x0 in (-7.0, -2.5, 3.0, 9.0):
        x, trace, cert = run_and_inspect(
            lambda p: gradient_descent(oracle, p, config), oracle, [x0], policy3
        )
        global_hits += cert is not None and abs(x[0]) <= 1e-3 and trace.final_value <= 1e-6
    fabricated = certify_decomposition(quad_sine_decomposition("bounded"), [9.0], R=0.7)
    ok = all_pass and global_hits == 4 and not fabricated.passed
    _line(9, "theory certification", ok,
          f"{len(reports)} certificates inside bounds, theorem-3 radius {R3:.3f} "
          f"reached the global minimizer {global_hits}/4, fabricated point rejected")
    assert all_pass
    assert global_hits == 4
    assert not fabricated.passed
