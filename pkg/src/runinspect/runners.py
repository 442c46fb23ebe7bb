"""
Descent solvers for the "run" phase.

Six solvers, each iterating until a stagnation rule fires and returning
a :class:`RunTrace` the orchestrator can resume from:

- gradient_descent, block_coordinate_descent: fixed-step first-order
  methods on any oracle with a gradient.
- em_kmeans: Lloyd's alternating labeling/re-centering on the k-means
  objective f(z) = (1/2n) sum_i min_j ||x_i - z_j||^2.
- irls_tukey: iteratively reweighted least squares with Tukey bisquare
  weights for bounded-loss robust regression.
- cd_half_threshold: cyclic exact coordinate minimization of
  (1/2)||Ax - b||^2 + lam * sum_j sqrt(|x_j|) via the half-threshold
  closed form, with an O(m)-per-coordinate cached residual.
- prox_linear_mcp: proximal gradient on logistic loss plus a weighted
  minimax-concave penalty.

All but prox_linear_mcp are descent methods (objective never increases
along the trace); prox_linear_mcp carries no such guarantee at the
experiment step size and its trace is not asserted monotone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from runinspect import kernels
from runinspect.core import (
    BlockSpec,
    EvaluationError,
    ObjectiveOracle,
    RunTrace,
    evaluate,
)

# Weighted least-squares systems with condition numbers beyond this are
# treated as degenerate (the runner stagnates instead of solving).
_IRLS_COND_LIMIT = 1e12


@dataclass(frozen=True)
class RunnerConfig:
    """Step size, iteration budget, and stagnation rule.

    A runner stops with status ``"stagnated"`` when the objective moved
    by at most ``eps_stag`` over the last ``patience`` iterations (or,
    for the solvers with natural fixed points, when their own
    fixed-point test fires). ``record_points``, when set, stores every
    iterate vector on the trace (needed for trajectory output; off by
    default to keep long runs cheap).
    """

    step_size: float = 0.1
    max_iters: int = 100_000
    eps_stag: float = 1e-8
    patience: int = 5
    record_points: bool = False

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError("step size must be positive")
        if self.max_iters < 1:
            raise ValueError("need at least one iteration")
        if self.eps_stag < 0:
            raise ValueError("stagnation tolerance must be nonnegative")
        if self.patience < 1:
            raise ValueError("patience must be at least 1")


def _point_arg(config: RunnerConfig, x: np.ndarray) -> Optional[np.ndarray]:
    return x if config.record_points else None


def _finish(trace: RunTrace, x: np.ndarray, value: float, status: str) -> RunTrace:
    trace.final_point = np.array(x, dtype=float, copy=True)
    trace.final_value = float(value)
    trace.status = status
    return trace


def _require_gradient(oracle: ObjectiveOracle) -> None:
    if oracle.grad is None:
        raise ValueError("this runner needs an oracle with a gradient")


def _gradient(oracle: ObjectiveOracle, x: np.ndarray) -> np.ndarray:
    g = np.asarray(oracle.grad(x), dtype=float)
    if not np.all(np.isfinite(g)):
        raise EvaluationError("gradient evaluated to a non-finite value", x)
    return g


def gradient_descent(
    oracle: ObjectiveOracle, x0, config: RunnerConfig
) -> RunTrace:
    """Fixed-step gradient descent to stagnation.

    Iterates x <- x - step * grad F(x) until the objective changes by at
    most ``eps_stag`` over ``patience`` iterations. A divergence guard
    aborts with status ``"diverged"`` after ``patience`` consecutive
    objective increases.
    """
    _require_gradient(oracle)
    x = np.asarray(x0, dtype=float).copy()
    f = evaluate(oracle, x)
    trace = RunTrace()
    trace.record("run", 0, f, point=_point_arg(config, x))
    history = [f]
    rising = 0
    for t in range(1, config.max_iters + 1):
        x_new = x - config.step_size * _gradient(oracle, x)
        f_new = evaluate(oracle, x_new)
        rising = rising + 1 if f_new > f else 0
        x, f = x_new, f_new
        trace.record("run", t, f, point=_point_arg(config, x))
        history.append(f)
        if rising >= config.patience:
            return _finish(trace, x, f, "diverged")
        if t >= config.patience and abs(history[t] - history[t - config.patience]) <= config.eps_stag:
            return _finish(trace, x, f, "stagnated")
    return _finish(trace, x, f, "max_iters")


def block_coordinate_descent(
    oracle: ObjectiveOracle, blocks: Optional[BlockSpec], x0, config: RunnerConfig
) -> RunTrace:
    """Cyclic per-block gradient steps (Gauss-Seidel), stagnation as GD.

    One trace iteration is a full sweep over the blocks; the gradient is
    re-evaluated at the current point before each block step. With a
    single whole-space block each sweep is exactly one gradient-descent
    step.
    """
    _require_gradient(oracle)
    spec = blocks if blocks is not None else oracle.blocks
    if spec is None:
        spec = BlockSpec.whole(oracle.dim)
    x = np.asarray(x0, dtype=float).copy()
    f = evaluate(oracle, x)
    trace = RunTrace()
    trace.record("run", 0, f, point=_point_arg(config, x))
    history = [f]
    rising = 0
    for t in range(1, config.max_iters + 1):
        for i in range(spec.s):
            idx = spec.indices(i)
            g = _gradient(oracle, x)
            x[idx] -= config.step_size * g[idx]
        f_new = evaluate(oracle, x)
        rising = rising + 1 if f_new > f else 0
        f = f_new
        trace.record("run", t, f, point=_point_arg(config, x))
        history.append(f)
        if rising >= config.patience:
            return _finish(trace, x, f, "diverged")
        if t >= config.patience and abs(history[t] - history[t - config.patience]) <= config.eps_stag:
            return _finish(trace, x, f, "stagnated")
    return _finish(trace, x, f, "max_iters")


def _kmeans_value(data: np.ndarray, centers: np.ndarray) -> Tuple[np.ndarray, float]:
    labels, total = kernels.kmeans_assign(data, centers)
    return labels, total / (2.0 * len(data))


def _reseed_empty(
    data: np.ndarray, centers: np.ndarray, labels: np.ndarray, counts: np.ndarray
) -> np.ndarray:
    """Move each empty cluster's center onto a badly-fit data point.

    Deterministic: the point with the largest distance to its assigned
    center claims the first empty cluster, the next-farthest distinct
    point the next one, and so on.
    """
    d = data - centers[labels]
    dist2 = np.einsum("ij,ij->i", d, d)
    order = np.argsort(-dist2, kind="stable")
    empties = np.flatnonzero(counts == 0)
    for rank, j in enumerate(empties):
        centers[j] = data[order[rank]]
    return centers


def em_kmeans(
    data: np.ndarray, K: int, z0, config: Optional[RunnerConfig] = None
) -> RunTrace:
    """Lloyd's algorithm; stops when the labels stop changing.

    ``z0`` may be a (K, d) center array or its flattened form; the trace
    works in the flattened form (d coordinates per center block) so the
    orchestrator can inspect centers blockwise. An empty cluster is
    re-seeded at the data point currently farthest from its assigned
    center.
    """
    config = config or RunnerConfig()
    data = np.ascontiguousarray(data, dtype=float)
    n, d = data.shape
    if not (1 <= K <= n):
        raise ValueError("need 1 <= K <= number of points")
    centers = np.array(z0, dtype=float, copy=True).reshape(K, d)
    labels, f = _kmeans_value(data, centers)
    trace = RunTrace()
    trace.record("run", 0, f, point=_point_arg(config, centers.ravel()))
    status = "max_iters"
    for t in range(1, config.max_iters + 1):
        sums = np.zeros((K, d))
        np.add.at(sums, labels, data)
        counts = np.bincount(labels, minlength=K)
        nonempty = counts > 0
        centers[nonempty] = sums[nonempty] / counts[nonempty, None]
        if not np.all(nonempty):
            centers = _reseed_empty(data, centers, labels, counts)
        new_labels, f = _kmeans_value(data, centers)
        trace.record("run", t, f, point=_point_arg(config, centers.ravel()))
        if np.array_equal(new_labels, labels):
            status = "stagnated"
            break
        labels = new_labels
    return _finish(trace, centers.ravel(), f, status)


def tukey_loss(r: np.ndarray, r0: float) -> np.ndarray:
    """Tukey bisquare loss, elementwise; flat at r0**2/6 for |r| >= r0."""
    r = np.asarray(r, dtype=float)
    out = np.full(r.shape, r0 * r0 / 6.0)
    small = np.abs(r) < r0
    u = 1.0 - (r[small] / r0) ** 2
    out[small] = (r0 * r0 / 6.0) * (1.0 - u**3)
    return out


def tukey_weights(r: np.ndarray, r0: float) -> np.ndarray:
    """IRLS weights w = (1 - (r/r0)**2)**2 inside |r| < r0, else 0."""
    r = np.asarray(r, dtype=float)
    w = np.zeros_like(r)
    small = np.abs(r) < r0
    w[small] = (1.0 - (r[small] / r0) ** 2) ** 2
    return w


def irls_tukey(
    X: np.ndarray,
    y: np.ndarray,
    beta0,
    r0: float = 4.685,
    config: Optional[RunnerConfig] = None,
) -> RunTrace:
    """Iteratively reweighted least squares under the Tukey loss.

    Alternates residuals, bisquare weights, and a weighted
    least-squares solve; stops when the coefficient step falls to
    ``eps_stag``. A degenerate weighted system (all weights zero, or
    condition number beyond 1e12) is reported as stagnation so the
    caller can hand the point to inspection instead of crashing.
    """
    config = config or RunnerConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    beta = np.asarray(beta0, dtype=float).copy()
    n = len(y)

    def loss(b):
        return float(tukey_loss(y - X @ b, r0).sum() / n)

    trace = RunTrace()
    f = loss(beta)
    trace.record("run", 0, f, point=_point_arg(config, beta))
    status = "max_iters"
    for t in range(1, config.max_iters + 1):
        w = tukey_weights(y - X @ beta, r0)
        if not np.any(w > 0):
            status = "stagnated"
            break
        Xw = X * w[:, None]
        G = X.T @ Xw
        if not np.all(np.isfinite(G)) or np.linalg.cond(G) > _IRLS_COND_LIMIT:
            status = "stagnated"
            break
        try:
            beta_new = np.linalg.solve(G, Xw.T @ y)
        except np.linalg.LinAlgError:
            status = "stagnated"
            break
        f = loss(beta_new)
        trace.record("run", t, f, point=_point_arg(config, beta_new))
        step = float(np.linalg.norm(beta_new - beta))
        beta = beta_new
        if step <= config.eps_stag:
            status = "stagnated"
            break
    return _finish(trace, beta, f, status)


def half_threshold_scalar(z: float, lam: float) -> float:
    """Exact scalar half-threshold map; see kernels.half_threshold_scalar."""
    return kernels.half_threshold_scalar(z, lam)


def cs_objective_value(
    resid: np.ndarray, x: np.ndarray, lam: float
) -> float:
    """(1/2)||resid||^2 + lam * sum_j sqrt(|x_j|)."""
    return 0.5 * float(resid @ resid) + lam * float(np.sqrt(np.abs(x)).sum())


def cd_half_threshold(
    A: np.ndarray,
    b: np.ndarray,
    lam: float,
    x0,
    config: Optional[RunnerConfig] = None,
) -> RunTrace:
    """Cyclic coordinate descent on the half-norm regularized least squares.

    Coordinate j moves to the exact minimizer of its 1-D subproblem:
    x_j <- H(x_j - A_j.(Ax - b)/||A_j||^2, lam/||A_j||^2) with H the
    half-threshold map. The residual Ax - b is cached and updated in
    O(m) per coordinate (refreshed from scratch every 64 sweeps to shed
    float drift). Stops when a full sweep moves no coordinate by more
    than ``eps_stag``.

    Raises
    ------
    ValueError
        If any column of A is identically zero.
    """
    config = config or RunnerConfig()
    A = np.ascontiguousarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if lam <= 0:
        raise ValueError("lam must be positive")
    col_norms_sq = np.einsum("ij,ij->j", A, A)
    if np.any(col_norms_sq == 0.0):
        raise ValueError("A has a zero column; its coordinate subproblem is degenerate")
    x = np.asarray(x0, dtype=float).copy()
    resid = A @ x - b
    trace = RunTrace()
    f = cs_objective_value(resid, x, lam)
    trace.record("run", 0, f, point=_point_arg(config, x))
    status = "max_iters"
    for t in range(1, config.max_iters + 1):
        if t % 64 == 0:
            resid = A @ x - b
        max_change = kernels.cd_half_sweep(A, x, resid, lam, col_norms_sq)
        f = cs_objective_value(resid, x, lam)
        trace.record("run", t, f, point=_point_arg(config, x))
        if max_change <= config.eps_stag:
            status = "stagnated"
            break
    return _finish(trace, x, f, status)


def iterative_half_thresholding(
    A: np.ndarray,
    b: np.ndarray,
    lam: float,
    x0,
    config: Optional[RunnerConfig] = None,
) -> RunTrace:
    """Full-vector iterative half thresholding (the standalone baseline).

    x <- H(x - mu * A.T (Ax - b), lam * mu) with mu = 1/||A||_2^2 (the
    spectral norm; our convention, the method is usually cited without
    parameters). Stops when the largest coordinate change falls to
    ``eps_stag``.
    """
    config = config or RunnerConfig()
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    mu = 1.0 / float(np.linalg.norm(A, 2)) ** 2
    x = np.asarray(x0, dtype=float).copy()
    resid = A @ x - b
    trace = RunTrace()
    f = cs_objective_value(resid, x, lam)
    trace.record("run", 0, f, point=_point_arg(config, x))
    status = "max_iters"
    for t in range(1, config.max_iters + 1):
        x_new = kernels.half_threshold(x - mu * (A.T @ resid), lam * mu)
        change = float(np.max(np.abs(x_new - x))) if len(x) else 0.0
        x = x_new
        resid = A @ x - b
        f = cs_objective_value(resid, x, lam)
        trace.record("run", t, f, point=_point_arg(config, x))
        if change <= config.eps_stag:
            status = "stagnated"
            break
    return _finish(trace, x, f, status)


def mcp_penalty(x, lam: float, gamma: float) -> float:
    """Minimax concave penalty, summed over the components of x.

    Per component: lam*|t| - t**2/(2*gamma) when |t| <= gamma*lam, and
    the constant gamma*lam**2/2 beyond (the penalty flattens out).
    """
    if gamma <= 0 or lam < 0:
        raise ValueError("need gamma > 0 and lam >= 0")
    t = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    inner = t <= gamma * lam
    vals = np.full(t.shape, 0.5 * gamma * lam * lam)
    vals[inner] = lam * t[inner] - t[inner] ** 2 / (2.0 * gamma)
    return float(vals.sum())


def mcp_prox(z, lam: float, gamma: float):
    """Componentwise prox of the unit-weight MCP, gamma > 1.

    Firm thresholding: (gamma/(gamma-1)) * soft_lam(z) when
    |z| <= gamma*lam, identity beyond.
    """
    if gamma <= 1:
        raise ValueError("the unit MCP prox needs gamma > 1")
    return scaled_mcp_prox(z, lam, gamma, 1.0)


def scaled_mcp_prox(z, lam: float, gamma: float, c: float):
    """Componentwise exact minimizer of (1/2)(x-z)**2 + c*MCP_{lam,gamma}(x).

    Scaling folds into the parameters: c * MCP_{lam, gamma} equals
    MCP_{c*lam, gamma/c} pointwise, so for gamma/c > 1 this is firm
    thresholding with (lam', gamma') = (c*lam, gamma/c); for
    gamma/c <= 1 the combined objective turns into hard thresholding at
    sqrt(c*gamma)*lam (0 wins ties, keeping the result sparser).
    """
    if c <= 0 or gamma <= 0 or lam < 0:
        raise ValueError("need c > 0, gamma > 0, lam >= 0")
    z = np.asarray(z, dtype=float)
    scalar_in = z.ndim == 0
    z = np.atleast_1d(z)
    lam_eff = c * lam
    gamma_eff = gamma / c
    out = np.empty_like(z)
    if gamma_eff > 1.0:
        az = np.abs(z)
        inner = az <= gamma_eff * lam_eff
        soft = np.sign(z) * np.maximum(az - lam_eff, 0.0)
        out[inner] = (gamma_eff / (gamma_eff - 1.0)) * soft[inner]
        out[~inner] = z[~inner]
    else:
        cut = np.sqrt(c * gamma) * lam
        keep = np.abs(z) > cut
        out[keep] = z[keep]
        out[~keep] = 0.0
    return float(out[0]) if scalar_in else out


def logistic_loss(u: np.ndarray, y: np.ndarray) -> float:
    """sum_i log(1 + exp(u_i)) - y_i * u_i, computed overflow-free."""
    return float(np.logaddexp(0.0, u).sum() - u @ y)


def prox_linear_mcp(
    data: Tuple[np.ndarray, np.ndarray],
    beta_weight: float,
    lam: float,
    gamma: float,
    step: float,
    theta0,
    config: Optional[RunnerConfig] = None,
) -> RunTrace:
    """Proximal gradient for logistic loss + beta_weight * MCP penalty.

    theta <- prox of (step * beta_weight * MCP) at theta - step * grad l,
    where l is the logistic negative log-likelihood of labels y in
    {0, 1}. Stops when ||theta step|| <= eps_stag. The trace records the
    penalized objective but is NOT guaranteed monotone at the experiment
    step size; compare final values, not iterates.
    """
    config = config or RunnerConfig()
    X, y = data
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    theta = np.asarray(theta0, dtype=float).copy()

    def objective(t, u):
        return logistic_loss(u, y) + beta_weight * mcp_penalty(t, lam, gamma)

    u = X @ theta
    trace = RunTrace()
    f = objective(theta, u)
    trace.record("run", 0, f, point=_point_arg(config, theta))
    status = "max_iters"
    c = step * beta_weight
    for t in range(1, config.max_iters + 1):
        # stable sigmoid, no overflow for large |u|
        sigma = np.where(u >= 0, 1.0 / (1.0 + np.exp(-np.abs(u))),
                         np.exp(-np.abs(u)) / (1.0 + np.exp(-np.abs(u))))
        grad = X.T @ (sigma - y)
        theta_new = scaled_mcp_prox(theta - step * grad, lam, gamma, c)
        moved = float(np.linalg.norm(theta_new - theta))
        theta = theta_new
        u = X @ theta
        f = objective(theta, u)
        trace.record("run", t, f, point=_point_arg(config, theta))
        if moved <= config.eps_stag:
            status = "stagnated"
            break
    return _finish(trace, theta, f, status)
