"""
Hot numeric kernels with a numba backend and a pure-numpy fallback.

Three loops dominate the experiment runtimes: the scalar half-threshold
map applied over vectors, the cyclic half-threshold coordinate-descent
sweep, and the k-means assignment step. Each has two interchangeable
implementations. The active one is chosen at import time from the
RUNINSPECT_BACKEND environment variable:

    auto   use numba when importable, else numpy (default)
    numba  require numba, fail loudly if missing
    numpy  force the pure-numpy path

``set_backend`` switches at runtime (used by the benchmark script and
the equivalence tests). The scalar half-threshold map is bitwise
identical across backends; the vector and sweep kernels agree to
floating-point roundoff (different summation orders), pinned at
1e-12 relative by the equivalence tests. See benchmarks/kernel_bench.py
for the speed comparison.
"""

from __future__ import annotations

import math
import os
from typing import Tuple

import numpy as np

_ENV_VAR = "RUNINSPECT_BACKEND"
_CHOICES = ("auto", "numba", "numpy")


def half_threshold_tau(lam: float) -> float:
    """Threshold below which the half-threshold map returns 0.

    tau(lam) = (54**(1/3) / 4) * (2*lam)**(2/3), which simplifies to
    1.5 * lam**(2/3).
    """
    return (54.0 ** (1.0 / 3.0) / 4.0) * (2.0 * lam) ** (2.0 / 3.0)


def _half_scalar_py(z: float, lam: float) -> float:
    az = abs(z)
    tau = (54.0 ** (1.0 / 3.0) / 4.0) * (2.0 * lam) ** (2.0 / 3.0)
    if az <= tau:
        return 0.0
    # az > tau keeps the arccos argument in (0, 1/sqrt(2)], so this is safe.
    phi = math.acos((lam / 4.0) * (az / 3.0) ** (-1.5))
    return (2.0 / 3.0) * z * (1.0 + math.cos(2.0 * math.pi / 3.0 - (2.0 / 3.0) * phi))


def _half_vec_numpy(z: np.ndarray, lam: float) -> np.ndarray:
    az = np.abs(z)
    out = np.zeros_like(z)
    mask = az > half_threshold_tau(lam)
    if np.any(mask):
        phi = np.arccos((lam / 4.0) * (az[mask] / 3.0) ** (-1.5))
        out[mask] = (
            (2.0 / 3.0)
            * z[mask]
            * (1.0 + np.cos(2.0 * np.pi / 3.0 - (2.0 / 3.0) * phi))
        )
    return out


def _cd_sweep_numpy(
    A: np.ndarray,
    x: np.ndarray,
    resid: np.ndarray,
    lam: float,
    col_norms_sq: np.ndarray,
) -> float:
    max_change = 0.0
    for j in range(A.shape[1]):
        nj = col_norms_sq[j]
        w = x[j] - float(A[:, j] @ resid) / nj
        xj_new = _half_scalar_py(w, lam / nj)
        d = xj_new - x[j]
        if d != 0.0:
            resid += A[:, j] * d
            x[j] = xj_new
            if abs(d) > max_change:
                max_change = abs(d)
    return max_change


def _kmeans_numpy(data: np.ndarray, centers: np.ndarray) -> Tuple[np.ndarray, float]:
    d2 = ((data[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1).astype(np.int64)
    total = float(d2[np.arange(len(data)), labels].sum())
    return labels, total


def _build_numba():
    from numba import njit

    half_scalar = njit(_half_scalar_py)

    @njit
    def half_vec(z, lam):
        out = np.empty_like(z)
        for i in range(z.shape[0]):
            out[i] = half_scalar(z[i], lam)
        return out

    @njit
    def cd_sweep(A, x, resid, lam, col_norms_sq):
        m, n = A.shape
        max_change = 0.0
        for j in range(n):
            cj = 0.0
            for i in range(m):
                cj += A[i, j] * resid[i]
            nj = col_norms_sq[j]
            w = x[j] - cj / nj
            xj_new = half_scalar(w, lam / nj)
            d = xj_new - x[j]
            if d != 0.0:
                for i in range(m):
                    resid[i] += A[i, j] * d
                x[j] = xj_new
                if abs(d) > max_change:
                    max_change = abs(d)
        return max_change

    @njit
    def kmeans(data, centers):
        n, d = data.shape
        K = centers.shape[0]
        labels = np.empty(n, dtype=np.int64)
        total = 0.0
        for i in range(n):
            best = np.inf
            bj = 0
            for j in range(K):
                s = 0.0
                for t in range(d):
                    diff = data[i, t] - centers[j, t]
                    s += diff * diff
                if s < best:
                    best = s
                    bj = j
            labels[i] = bj
            total += best
        return labels, total

    return {
        "name": "numba",
        "half_scalar": half_scalar,
        "half_vec": half_vec,
        "cd_sweep": cd_sweep,
        "kmeans": kmeans,
    }


_NUMPY_IMPL = {
    "name": "numpy",
    "half_scalar": _half_scalar_py,
    "half_vec": _half_vec_numpy,
    "cd_sweep": _cd_sweep_numpy,
    "kmeans": _kmeans_numpy,
}

_ACTIVE = dict(_NUMPY_IMPL)


def set_backend(name: str) -> str:
    """Select the kernel backend; returns the name actually activated."""
    name = name.strip().lower()
    if name not in _CHOICES:
        raise ValueError(f"unknown backend {name!r}; choose from {_CHOICES}")
    global _ACTIVE
    if name == "numpy":
        _ACTIVE = dict(_NUMPY_IMPL)
    elif name == "numba":
        _ACTIVE = _build_numba()
    else:
        try:
            _ACTIVE = _build_numba()
        except ImportError:
            _ACTIVE = dict(_NUMPY_IMPL)
    return _ACTIVE["name"]


def active_backend() -> str:
    return _ACTIVE["name"]


def half_threshold_scalar(z: float, lam: float) -> float:
    """Exact minimizer of (1/2)(x - z)**2 + lam*sqrt(|x|) over x.

    Returns 0 when |z| <= half_threshold_tau(lam); otherwise the closed
    form (2/3)*z*(1 + cos(2*pi/3 - (2/3)*arccos((lam/4)*(|z|/3)**(-3/2)))).
    At |z| exactly tau both 0 and the closed form attain the same
    objective; 0 (the sparser minimizer) is returned.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    return float(_ACTIVE["half_scalar"](float(z), float(lam)))


def half_threshold(z: np.ndarray, lam: float) -> np.ndarray:
    """Componentwise half-threshold map over a vector."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    z = np.ascontiguousarray(z, dtype=float)
    return _ACTIVE["half_vec"](z, float(lam))


def cd_half_sweep(
    A: np.ndarray,
    x: np.ndarray,
    resid: np.ndarray,
    lam: float,
    col_norms_sq: np.ndarray,
) -> float:
    """One cyclic coordinate sweep of the half-threshold CD update.

    Updates ``x`` and the cached residual ``resid = A x - b`` in place;
    coordinate j moves to the exact minimizer of the 1-D subproblem with
    scaling 1/||A_j||**2. Returns the largest absolute coordinate change.
    """
    return float(_ACTIVE["cd_sweep"](A, x, resid, float(lam), col_norms_sq))


def kmeans_assign(data: np.ndarray, centers: np.ndarray) -> Tuple[np.ndarray, float]:
    """Nearest-center labels and the summed squared distances."""
    data = np.ascontiguousarray(data, dtype=float)
    centers = np.ascontiguousarray(centers, dtype=float)
    labels, total = _ACTIVE["kmeans"](data, centers)
    return np.asarray(labels, dtype=np.int64), float(total)


set_backend(os.environ.get(_ENV_VAR, "auto"))
