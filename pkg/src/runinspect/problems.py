"""
Benchmark objectives and seeded data generators.

Every generator is a pure function of its seed: it draws uniforms from
numpy's default_rng and converts them to Gaussians with an explicit
Box-Muller transform, so the produced numbers are reproducible from the
documented uniform stream alone (no dependence on the library's own
normal() implementation).
"""

from __future__ import annotations

import csv
import threading
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Tuple

import numpy as np

from runinspect import kernels
from runinspect.core import BlockSpec, ObjectiveOracle
from runinspect.runners import logistic_loss, mcp_penalty, tukey_loss, tukey_weights


def gaussian_from_uniform(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normals via Box-Muller on rng.random() uniforms.

    z1 = sqrt(-2 log(1-u1)) cos(2 pi u2), z2 = same with sin; (1-u1)
    keeps the log argument in (0, 1] since rng.random() is in [0, 1).
    """
    n = int(np.prod(shape)) if not np.isscalar(shape) else int(shape)
    pairs = (n + 1) // 2
    u1 = rng.random(pairs)
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:n]
    return z.reshape(shape) if not np.isscalar(shape) else z


class _BaseCache:
    """Holds one auxiliary record keyed on the base point's bytes.

    Partial evaluators call ``get`` with the inspection center; the
    builder runs once per distinct center. Synchronized so concurrent
    batch evaluation stays safe.
    """

    def __init__(self, builder):
        self._builder = builder
        self._key = None
        self._aux = None
        self._lock = threading.Lock()

    def get(self, x: np.ndarray):
        key = x.tobytes()
        with self._lock:
            if key != self._key:
                self._aux = self._builder(x)
                self._key = key
            return self._aux


# ---------------------------------------------------------------------------
# 1-D quadratic-plus-sine landscape


@dataclass(frozen=True)
class QuadSineParams:
    """Amplitude and frequency of the sine-perturbed half-quadratic."""

    a: float = 0.3
    b: float = 3.0

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise ValueError("parameters must be finite")
        if self.a < 0 or self.b <= 0:
            raise ValueError("need a >= 0 and b > 0")


def quad_sine(params: Optional[QuadSineParams] = None) -> ObjectiveOracle:
    """F(x) = x^2/2 + a sin(b pi (x - 1/(2b))) + a, minimized at 0 with F=0."""
    if params is None:
        params = QuadSineParams()
    a, b = params.a, params.b

    def fn(x):
        t = float(x[0])
        return t * t / 2.0 + a * np.sin(b * np.pi * (t - 1.0 / (2 * b))) + a

    def grad(x):
        t = float(x[0])
        return np.array([t + a * b * np.pi * np.cos(b * np.pi * (t - 1.0 / (2 * b)))])

    def batch_fn(X):
        t = X[:, 0]
        return t * t / 2.0 + a * np.sin(b * np.pi * (t - 1.0 / (2 * b))) + a

    return ObjectiveOracle(dim=1, fn=fn, grad=grad, batch_fn=batch_fn)


# ---------------------------------------------------------------------------
# Asymmetric Ackley-style 2-D landscape

# Value and location of the best grid point of the 10^-3-resolution grid
# over [-10, 10]^2 after local gradient refinement; recomputable with
# ackley_grid_minimum(). Frozen so experiment comparisons don't pay the
# 4e8-point scan.
ACKLEY_GLOBAL_MIN_POINT = (1.095800490621185, 1.242998112300419)
ACKLEY_GLOBAL_MIN_VALUE = -2.5563618484058352


def modified_ackley() -> ObjectiveOracle:
    """Asymmetric exponential-of-sines landscape on R^2.

    F(x, y) = -20 exp(-0.04(x^2+y^2))
              - exp(0.7(sin(xy) + sin y) + 0.2 sin(x^2)) + 20,
    a field of irregularly placed local minimizers; F(0, 0) = -1.
    """

    def parts(x, y):
        u = np.exp(-0.04 * (x * x + y * y))
        g = np.exp(0.7 * (np.sin(x * y) + np.sin(y)) + 0.2 * np.sin(x * x))
        return u, g

    def fn(v):
        x, y = float(v[0]), float(v[1])
        u, g = parts(x, y)
        return -20.0 * u - g + 20.0

    def grad(v):
        x, y = float(v[0]), float(v[1])
        u, g = parts(x, y)
        gx = 1.6 * x * u - g * (0.7 * y * np.cos(x * y) + 0.4 * x * np.cos(x * x))
        gy = 1.6 * y * u - g * (0.7 * x * np.cos(x * y) + 0.7 * np.cos(y))
        return np.array([gx, gy])

    def batch_fn(X):
        x, y = X[:, 0], X[:, 1]
        u, g = parts(x, y)
        return -20.0 * u - g + 20.0

    return ObjectiveOracle(dim=2, fn=fn, grad=grad, batch_fn=batch_fn)


def ackley_grid_minimum(
    resolution: float = 1e-3, box: float = 10.0, refine: bool = True
) -> Tuple[np.ndarray, float]:
    """Grid-search oracle for the asymmetric Ackley landscape.

    Scans the regular grid of the given resolution over [-box, box]^2
    row by row (vectorized, constant memory) and optionally polishes the
    best grid point with small-step gradient descent. Returns (point,
    value).
    """
    oracle = modified_ackley()
    ticks = np.arange(-box, box + resolution / 2, resolution)
    best_val = np.inf
    best_xy = (0.0, 0.0)
    for x in ticks:
        vals = oracle.batch_fn(np.column_stack((np.full_like(ticks, x), ticks)))
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val = float(vals[j])
            best_xy = (float(x), float(ticks[j]))
    point = np.array(best_xy)
    if refine:
        from runinspect.runners import RunnerConfig, gradient_descent

        cfg = RunnerConfig(step_size=5e-3, max_iters=200_000, eps_stag=1e-15,
                           patience=10)
        trace = gradient_descent(oracle, point, cfg)
        point = trace.final_point
        best_val = trace.final_value
    return point, float(best_val)


# ---------------------------------------------------------------------------
# Gaussian mixture for k-means

GAUSS_MEANS = np.array([[-5.0, -3.0], [5.0, -3.0], [0.0, 5.0], [2.5, 4.0]])
GAUSS_COVS = np.array(
    [
        [[0.8, 0.1], [0.1, 0.8]],
        [[1.2, 0.6], [0.6, 0.7]],
        [[0.5, 0.05], [0.05, 1.6]],
        [[1.5, 0.05], [0.05, 0.6]],
    ]
)
GAUSS_POINTS_PER_COMPONENT = 1000


def gaussian_clusters(seed: int) -> np.ndarray:
    """4000 2-D points, 1000 per mixture component, in component order."""
    rng = np.random.default_rng(seed)
    parts = []
    for mean, cov in zip(GAUSS_MEANS, GAUSS_COVS):
        z = gaussian_from_uniform(rng, (GAUSS_POINTS_PER_COMPONENT, 2))
        parts.append(mean + z @ np.linalg.cholesky(cov).T)
    return np.concatenate(parts, axis=0)


# ---------------------------------------------------------------------------
# Iris measurements (bundled CSV)


def load_iris(path=None) -> np.ndarray:
    """Parse a 4-feature CSV into an (n, 4) array.

    The file must have 4 numeric columns; a 5th label column is ignored.
    A non-numeric first row is treated as a header and skipped. Any
    other malformed row raises ValueError naming its line number. With
    no path, the bundled 150-flower table is loaded.
    """
    if path is None:
        ref = resources.files("runinspect").joinpath("data/iris.csv")
        with ref.open("r", encoding="utf-8") as fh:
            return _parse_iris(fh)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return _parse_iris(fh)


def _parse_iris(fh) -> np.ndarray:
    rows = []
    for lineno, row in enumerate(csv.reader(fh), start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) < 4:
            raise ValueError(f"line {lineno}: expected at least 4 columns, got {len(row)}")
        try:
            rows.append([float(c) for c in row[:4]])
        except ValueError:
            if lineno == 1:
                continue  # header
            raise ValueError(f"line {lineno}: non-numeric feature value in {row[:4]!r}")
    if not rows:
        raise ValueError("no data rows found")
    return np.asarray(rows, dtype=float)


# ---------------------------------------------------------------------------
# Robust regression instance

ROBUST_N = 20
ROBUST_N_OUTLIERS = 4
ROBUST_NOISE_VAR = 0.5
ROBUST_OUTLIER_VAR = 5.0


def robust_reg_instance(seed: int, return_outliers: bool = False):
    """y = 5 + x + noise over 20 points, 4 of them spoiled.

    x ~ N(0,1); noise ~ N(0, 0.5) (variance convention); 4 outlier
    indices drawn without replacement get extra N(0, 5) noise added.
    Returns (X, y, beta_true) with X = [1, x] columns; pass
    ``return_outliers=True`` to also get the outlier index array.
    """
    rng = np.random.default_rng(seed)
    x = gaussian_from_uniform(rng, (ROBUST_N,))
    noise = gaussian_from_uniform(rng, (ROBUST_N,)) * np.sqrt(ROBUST_NOISE_VAR)
    beta_true = np.array([5.0, 1.0])
    y = beta_true[0] + beta_true[1] * x + noise
    outliers = rng.choice(ROBUST_N, size=ROBUST_N_OUTLIERS, replace=False)
    y[outliers] += gaussian_from_uniform(rng, (ROBUST_N_OUTLIERS,)) * np.sqrt(
        ROBUST_OUTLIER_VAR
    )
    X = np.column_stack((np.ones(ROBUST_N), x))
    if return_outliers:
        return X, y, beta_true, outliers
    return X, y, beta_true


def tukey_objective(X: np.ndarray, y: np.ndarray, r0: float = 4.685) -> ObjectiveOracle:
    """Mean Tukey bisquare loss of the residuals y - X beta.

    Bounded: values lie in [0, r0^2/6]. Comes with the analytic
    gradient -X.T psi(r)/n, psi(r) = r (1-(r/r0)^2)^2 inside |r| < r0.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape

    def fn(beta):
        return float(tukey_loss(y - X @ beta, r0).sum() / n)

    def grad(beta):
        r = y - X @ beta
        return -(X.T @ (r * tukey_weights(r, r0))) / n

    def batch_fn(B):
        R = y[None, :] - B @ X.T
        return tukey_loss(R, r0).sum(axis=1) / n

    return ObjectiveOracle(dim=p, fn=fn, grad=grad, batch_fn=batch_fn)


# ---------------------------------------------------------------------------
# Compressed sensing instance and objective


@dataclass(frozen=True)
class CsInstance:
    """Underdetermined sparse recovery data with exact measurements."""

    A: np.ndarray
    b: np.ndarray
    x_true: np.ndarray
    lam: float

    def __post_init__(self):
        m, n = self.A.shape
        if m >= n:
            raise ValueError("need more unknowns than measurements (m < n)")


def cs_instance(m: int, seed, lam: float = 0.05) -> CsInstance:
    """Sensing matrix U(0, 1/sqrt(m)), 10% nonzeros U(0.2, 0.8), b = A x exactly."""
    n = 2 * m
    k = n // 10
    rng = np.random.default_rng(seed)
    A = rng.random((m, n)) / np.sqrt(m)
    x_true = np.zeros(n)
    support = rng.choice(n, size=k, replace=False)
    x_true[support] = 0.2 + 0.6 * rng.random(k)
    b = A @ x_true
    return CsInstance(A=A, b=b, x_true=x_true, lam=lam)


def cs_objective(inst: CsInstance) -> ObjectiveOracle:
    """Q(x) = (1/2)||Ax - b||^2 + lam sum_j sqrt(|x_j|), with partial evaluators.

    The partial path caches (residual, sum of root magnitudes) for the
    current base point, so trying a few coordinates costs O(m) instead
    of a fresh matrix-vector product.
    """
    A, b, lam = inst.A, inst.b, inst.lam
    m, n = A.shape

    def fn(x):
        r = A @ x - b
        return 0.5 * float(r @ r) + lam * float(np.sqrt(np.abs(x)).sum())

    def batch_fn(X):
        R = X @ A.T - b[None, :]
        return 0.5 * np.einsum("ij,ij->i", R, R) + lam * np.sqrt(np.abs(X)).sum(axis=1)

    cache = _BaseCache(lambda x: (A @ x - b, float(np.sqrt(np.abs(x)).sum())))

    def partial_fn(x, idx, z):
        resid, root_sum = cache.get(x)
        r = resid + A[:, idx] @ (z - x[idx])
        roots = root_sum - np.sqrt(np.abs(x[idx])).sum() + np.sqrt(np.abs(z)).sum()
        return 0.5 * float(r @ r) + lam * float(roots)

    def partial_batch_fn(x, idx, Z):
        resid, root_sum = cache.get(x)
        R = resid[None, :] + (Z - x[idx]) @ A[:, idx].T
        roots = root_sum - np.sqrt(np.abs(x[idx])).sum() + np.sqrt(np.abs(Z)).sum(axis=1)
        return 0.5 * np.einsum("ij,ij->i", R, R) + lam * roots

    return ObjectiveOracle(
        dim=n,
        fn=fn,
        batch_fn=batch_fn,
        partial_fn=partial_fn,
        partial_batch_fn=partial_batch_fn,
    )


# ---------------------------------------------------------------------------
# k-means objective over stacked centers


def kmeans_objective(data: np.ndarray, K: int) -> ObjectiveOracle:
    """f(z) = (1/2n) sum_i min_j ||x_i - z_j||^2 over flattened centers.

    The oracle's vector is the row-major stack of the K centers and its
    block structure is one block per center. The partial path caches the
    per-point distance table of the base point, so moving one center
    re-scores against a single new column.
    """
    data = np.ascontiguousarray(data, dtype=float)
    n, d = data.shape
    blocks = BlockSpec.uniform(K * d, d)
    sq_norms = np.einsum("ij,ij->i", data, data)

    def fn(zflat):
        _, total = kernels.kmeans_assign(data, zflat.reshape(K, d))
        return total / (2.0 * n)

    def _aux(zflat):
        centers = zflat.reshape(K, d)
        D = (
            sq_norms[:, None]
            - 2.0 * data @ centers.T
            + np.einsum("ij,ij->i", centers, centers)[None, :]
        )
        if K == 1:
            other_min = np.full((n, 1), np.inf)
        else:
            part = np.partition(D, 1, axis=1)
            first, second = part[:, 0], part[:, 1]
            argmin = np.argmin(D, axis=1)
            other_min = np.where(
                argmin[:, None] == np.arange(K)[None, :], second[:, None], first[:, None]
            )
        return other_min

    cache = _BaseCache(_aux)

    def _block_of(idx):
        j, rem = divmod(int(idx[0]), d)
        if rem != 0 or len(idx) != d or int(idx[-1]) != j * d + d - 1:
            return None
        return j

    def partial_fn(x, idx, z):
        j = _block_of(idx)
        if j is None:
            y = np.array(x, copy=True)
            y[idx] = z
            return fn(y)
        other_min = cache.get(x)[:, j]
        dz = data - z[None, :]
        newd = np.einsum("ij,ij->i", dz, dz)
        return float(np.minimum(other_min, newd).sum()) / (2.0 * n)

    def partial_batch_fn(x, idx, Z):
        j = _block_of(idx)
        if j is None:
            out = np.empty(len(Z))
            for t, z in enumerate(Z):
                y = np.array(x, copy=True)
                y[idx] = z
                out[t] = fn(y)
            return out
        other_min = cache.get(x)[:, j]
        newd = (
            sq_norms[:, None]
            - 2.0 * data @ Z.T
            + np.einsum("ij,ij->i", Z, Z)[None, :]
        )
        return np.minimum(other_min[:, None], newd).sum(axis=0) / (2.0 * n)

    return ObjectiveOracle(
        dim=K * d,
        fn=fn,
        partial_fn=partial_fn,
        partial_batch_fn=partial_batch_fn,
        blocks=blocks,
    )


# ---------------------------------------------------------------------------
# Sparse logistic regression instance and objective

LOGREG_DIM = 50
LOGREG_N_TRAIN = 200
LOGREG_N_TEST = 1000


@dataclass(frozen=True)
class LogRegInstance:
    """Sparse-signal classification data with a held-out test set."""

    X: np.ndarray
    y: np.ndarray
    theta_true: np.ndarray
    eps: float
    K: int
    beta_weight: float
    X_test: np.ndarray
    y_test: np.ndarray


def logreg_instance(K: int, eps: float, seed) -> LogRegInstance:
    """Standard-Gaussian design; labels 1(x.theta + w >= 0), w ~ N(0, eps^2).

    theta has exactly K standard-Gaussian nonzeros; the penalty weight
    is 1.5 - 0.06 K. The 1000 test points draw fresh noise.
    """
    if not (1 <= K <= LOGREG_DIM):
        raise ValueError(f"need 1 <= K <= {LOGREG_DIM}")
    rng = np.random.default_rng(seed)
    X = gaussian_from_uniform(rng, (LOGREG_N_TRAIN, LOGREG_DIM))
    theta = np.zeros(LOGREG_DIM)
    support = rng.choice(LOGREG_DIM, size=K, replace=False)
    theta[support] = gaussian_from_uniform(rng, (K,))
    w = gaussian_from_uniform(rng, (LOGREG_N_TRAIN,)) * eps
    y = (X @ theta + w >= 0).astype(float)
    X_test = gaussian_from_uniform(rng, (LOGREG_N_TEST, LOGREG_DIM))
    w_test = gaussian_from_uniform(rng, (LOGREG_N_TEST,)) * eps
    y_test = (X_test @ theta + w_test >= 0).astype(float)
    return LogRegInstance(
        X=X,
        y=y,
        theta_true=theta,
        eps=eps,
        K=K,
        beta_weight=1.5 - 0.06 * K,
        X_test=X_test,
        y_test=y_test,
    )


def logreg_objective(
    inst: LogRegInstance, lam: float = 1.0, gamma: float = 5.0
) -> ObjectiveOracle:
    """Logistic loss plus beta_weight-scaled MCP, with partial evaluators.

    The partial path caches the margins X theta of the base point, so a
    two-coordinate move re-scores via two rank-one margin updates.
    """
    X, y, bw = inst.X, inst.y, inst.beta_weight
    n, p = X.shape

    def pen(v):
        return bw * mcp_penalty(v, lam, gamma)

    def fn(theta):
        return logistic_loss(X @ theta, y) + pen(theta)

    def batch_fn(T):
        U = T @ X.T
        return np.logaddexp(0.0, U).sum(axis=1) - U @ y + np.array(
            [pen(t) for t in T]
        )

    cache = _BaseCache(lambda t: (X @ t, pen(t)))

    def partial_fn(theta, idx, z):
        u, pen0 = cache.get(theta)
        u2 = u + X[:, idx] @ (z - theta[idx])
        p2 = pen0 - pen(theta[idx]) + pen(z)
        return logistic_loss(u2, y) + p2

    def partial_batch_fn(theta, idx, Z):
        u, pen0 = cache.get(theta)
        U = u[None, :] + (Z - theta[idx]) @ X[:, idx].T
        pens = pen0 - pen(theta[idx]) + np.array([pen(z) for z in Z])
        return np.logaddexp(0.0, U).sum(axis=1) - U @ y + pens

    return ObjectiveOracle(
        dim=p,
        fn=fn,
        batch_fn=batch_fn,
        partial_fn=partial_fn,
        partial_batch_fn=partial_batch_fn,
    )


def logreg_test_error(inst: LogRegInstance, theta: np.ndarray) -> float:
    """Misclassification rate of sign(X theta) on the held-out points."""
    pred = (inst.X_test @ theta >= 0).astype(float)
    return float(np.mean(pred != inst.y_test))
