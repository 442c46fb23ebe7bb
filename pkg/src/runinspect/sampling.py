"""
Deterministic sample-point generators for ball inspection.

All generators are pure: for fixed arguments they produce the exact same
sequence of points, in the exact same order, on every call and platform.
Ordering is always outside-in: the largest radius first, then ascending
angle (lexicographic for two angles), so a consumer scanning for the
first improving sample inspects the ball boundary before the interior.

Ring radii run R, R - dR, R - 2 dR, ... and stop before reaching zero;
the ball center is never re-sampled by the ring samplers. Grid nets do
include the lattice origin, ordered last.
"""

from __future__ import annotations

from typing import Iterator, List, Sequence, Tuple

import numpy as np

TWO_PI = 2.0 * np.pi

# Relative slack used when deciding whether a float ratio is an exact
# integer; keeps pi/10 angle steps at 20 per turn instead of 21.
_RATIO_EPS = 1e-9


class GridTooLargeError(ValueError):
    """Requested grid net exceeds the sample-count cap (dimension too high)."""


def angle_grid(dtheta: float) -> np.ndarray:
    """Angles 0, dtheta, 2*dtheta, ... below 2*pi.

    The step count is ceil(2*pi / dtheta), so the grid always closes the
    full circle; a dtheta not dividing 2*pi gets one extra, shorter gap.
    """
    if dtheta <= 0:
        raise ValueError("angle step must be positive")
    n = int(np.ceil(TWO_PI / dtheta - _RATIO_EPS))
    return np.arange(n) * dtheta


def radius_schedule(R: float, dR: float) -> np.ndarray:
    """Descending ring radii R, R - dR, ..., excluding zero."""
    if not (0 < dR <= R):
        raise ValueError("need 0 < dR <= R")
    count = int(np.ceil(R / dR - _RATIO_EPS))
    return R - dR * np.arange(count)


def ring_offsets_2d(r: float, angles: np.ndarray) -> np.ndarray:
    """(k, 2) array of offsets r*(cos t, sin t) for each angle t."""
    return np.column_stack((r * np.cos(angles), r * np.sin(angles)))


def polar4d_offsets(r: float, angles1: np.ndarray, angles2: np.ndarray) -> np.ndarray:
    """(k1*k2, 4) offsets r*(cos t1, sin t1, cos t2, sin t2), t1-major.

    Each row has Euclidean norm r*sqrt(2); r is the nominal ring radius.
    """
    t1 = np.repeat(angles1, len(angles2))
    t2 = np.tile(angles2, len(angles1))
    return r * np.column_stack((np.cos(t1), np.sin(t1), np.cos(t2), np.sin(t2)))


def line1d_offsets(r: float) -> np.ndarray:
    """(2, 1) offsets +r then -r."""
    return np.array([[r], [-r]])


def ring_samples_2d(
    center: Sequence[float], R: float, dR: float, dtheta: float
) -> Iterator[np.ndarray]:
    """Points center + r*(cos t, sin t), outer rings first, ascending t."""
    center = np.asarray(center, dtype=float)
    if center.shape != (2,):
        raise ValueError("center must be a 2-vector")
    angles = angle_grid(dtheta)
    for r in radius_schedule(R, dR):
        for off in ring_offsets_2d(r, angles):
            yield center + off


def polar4d_samples(
    center: Sequence[float], R: float, dR: float, dtheta1: float, dtheta2: float
) -> Iterator[np.ndarray]:
    """Two-angle 4-D ring samples, outside-in over r, lexicographic angles."""
    center = np.asarray(center, dtype=float)
    if center.shape != (4,):
        raise ValueError("center must be a 4-vector")
    angles1 = angle_grid(dtheta1)
    angles2 = angle_grid(dtheta2)
    for r in radius_schedule(R, dR):
        for off in polar4d_offsets(r, angles1, angles2):
            yield center + off


def line1d_samples(
    center: Sequence[float], R: float, dR: float
) -> Iterator[np.ndarray]:
    """1-D ring samples center + r then center - r, outside-in over r."""
    center = np.asarray(center, dtype=float)
    if center.shape != (1,):
        raise ValueError("center must be a 1-vector")
    for r in radius_schedule(R, dR):
        for off in line1d_offsets(r):
            yield center + off


def grid_net_offsets(
    dim: int, R: float, rbar: float, cap: int = 10_000_000
) -> np.ndarray:
    """Offsets of an rbar-dense net of the closed ball B(0, R) in R^dim.

    The net is the cubic lattice of width 2*rbar/sqrt(dim) intersected
    with the ball, plus the lattice points of the shell
    R < ||p|| <= R + rbar projected radially onto the sphere. The lattice
    alone covers interior points to within half a cell diagonal (= rbar)
    but misses points near the sphere whose nearest lattice cell center
    lies outside the ball; radial projection is non-expansive, so adding
    the projected shell restores the rbar covering of the whole ball.

    Offsets are ordered by descending norm, ties by lexicographic
    coordinates, with the origin last.

    Raises
    ------
    GridTooLargeError
        If the enclosing-box lattice would exceed ``cap`` points.
    """
    if not (0 < rbar <= R):
        raise ValueError("need 0 < rbar <= R")
    if dim < 1:
        raise ValueError("dimension must be positive")
    width = 2.0 * rbar / np.sqrt(dim)
    half = int(np.floor((R + rbar) / width + _RATIO_EPS))
    est = (2 * half + 1) ** dim
    if est > cap:
        raise GridTooLargeError(
            f"grid net would enumerate ~{est} lattice points (> cap {cap}); "
            "dimension too high for a grid net at this density"
        )
    axes = [np.arange(-half, half + 1) * width] * dim
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    norms = np.linalg.norm(pts, axis=1)
    inside = pts[norms <= R * (1 + 1e-12)]
    shell_mask = (norms > R * (1 + 1e-12)) & (norms <= R + rbar + 1e-12)
    shell = pts[shell_mask]
    if len(shell):
        shell = shell * (R / np.linalg.norm(shell, axis=1))[:, None]
    offs = np.concatenate([inside, shell], axis=0) if len(shell) else inside
    dist = np.linalg.norm(offs, axis=1)
    # lexsort uses the last key as primary: -dist first, then coordinates.
    order = np.lexsort(tuple(offs[:, j] for j in range(dim - 1, -1, -1)) + (-dist,))
    return offs[order]


def grid_net_samples(
    center: Sequence[float], R: float, rbar: float, cap: int = 10_000_000
) -> np.ndarray:
    """Grid-net samples of B(center, R) with density rbar; see grid_net_offsets."""
    center = np.asarray(center, dtype=float)
    return center[None, :] + grid_net_offsets(len(center), R, rbar, cap=cap)


def sparse_pair_blocks(
    x: Sequence[float], tol: float = 1e-8
) -> List[Tuple[int, int]]:
    """Index pairs (i, j) with |x_i| > tol and |x_j| <= tol.

    Pairs are ordered by descending |x_i|, ties by ascending i, then by
    ascending j. Each pair spans a 2-D inspection subspace that can move
    weight from a nonzero coordinate onto a zero one. The list is empty
    when x is all zero or all nonzero.
    """
    if tol < 0:
        raise ValueError("zero threshold must be nonnegative")
    x = np.asarray(x, dtype=float)
    nonzero = [i for i in range(len(x)) if abs(x[i]) > tol]
    zero = [j for j in range(len(x)) if abs(x[j]) <= tol]
    nonzero.sort(key=lambda i: (-abs(x[i]), i))
    return [(i, j) for i in nonzero for j in zero]
