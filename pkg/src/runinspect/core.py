"""
Objective-function abstraction, block structure, and evaluation bookkeeping.

Every solver and every inspection in this package talks to the objective
through an :class:`ObjectiveOracle`. The oracle wraps a plain value
function, an optional analytic gradient, and an optional partial
evaluator that recomputes the objective after changing only a subset of
coordinates (the workhorse of blockwise inspection, where thousands of
candidate points differ from the base point in one small block).

Evaluation counts are tracked on the oracle itself so that traces can
report exactly how many objective evaluations an experiment consumed.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np


class EvaluationError(RuntimeError):
    """Objective evaluation produced a non-finite value.

    Carries the offending point so callers can report where the model
    left its sane domain (inspection over a large radius can do that).
    """

    def __init__(self, message: str, point: np.ndarray):
        super().__init__(message)
        self.point = np.array(point, dtype=float, copy=True)


@dataclass(frozen=True)
class BlockSpec:
    """Partition of the coordinate indices ``0..n-1`` into ``s`` blocks.

    Blocks are contiguous ``(offset, length)`` ranges, disjoint, in
    ascending index order, and must cover all ``n`` coordinates.
    """

    blocks: tuple
    n: int

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("total dimension must be positive")
        if len(self.blocks) < 1:
            raise ValueError("need at least one block")
        pos = 0
        for off, length in self.blocks:
            if off != pos or length <= 0:
                raise ValueError(
                    "blocks must be contiguous, disjoint, and positive-length"
                )
            pos = off + length
        if pos != self.n:
            raise ValueError("block lengths must sum to the total dimension")

    @property
    def s(self) -> int:
        """Number of blocks."""
        return len(self.blocks)

    def indices(self, i: int) -> np.ndarray:
        """Index array of block ``i``."""
        off, length = self.blocks[i]
        return np.arange(off, off + length)

    def length(self, i: int) -> int:
        off, length = self.blocks[i]
        return length

    @staticmethod
    def whole(n: int) -> "BlockSpec":
        """Single block covering the whole space."""
        return BlockSpec(blocks=((0, n),), n=n)

    @staticmethod
    def uniform(n: int, block_len: int) -> "BlockSpec":
        """``n / block_len`` equal contiguous blocks; ``block_len | n``."""
        if n % block_len != 0:
            raise ValueError("block length must divide the total dimension")
        return BlockSpec(
            blocks=tuple((o, block_len) for o in range(0, n, block_len)), n=n
        )


@dataclass
class ObjectiveOracle:
    """Evaluation contract for an objective F on R^n.

    Parameters
    ----------
    dim : int
        Ambient dimension n.
    fn : callable
        Maps a length-n vector to a float. Must be deterministic.
    grad : callable, optional
        Analytic gradient, same input, returns a length-n vector.
    partial_fn : callable, optional
        ``partial_fn(x, idx, z) -> float`` returns F at the point equal
        to ``x`` with ``x[idx]`` replaced by ``z``. Implementations may
        keep a cached factorization (residuals, distance tables) keyed
        on the base point; caches must be synchronized, because batches
        of candidate points may be evaluated concurrently.
    partial_batch_fn : callable, optional
        ``partial_batch_fn(x, idx, Z) -> (k,) array`` vectorizing
        ``partial_fn`` over the rows of ``Z`` (shape ``(k, len(idx))``).
    batch_fn : callable, optional
        ``batch_fn(X) -> (k,) array`` vectorizing ``fn`` over rows of X.
    blocks : BlockSpec, optional
        Natural block structure of the problem, if it has one.

    Notes
    -----
    ``value_evals`` counts every point at which F was computed through
    this oracle (batch calls add the batch size); ``block_evals`` counts
    the subset that went through a partial evaluator. Counter updates
    are lock-protected so concurrent batch evaluation keeps them exact.
    """

    dim: int
    fn: Callable[[np.ndarray], float]
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    partial_fn: Optional[Callable[[np.ndarray, np.ndarray, np.ndarray], float]] = None
    partial_batch_fn: Optional[
        Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    ] = None
    batch_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    blocks: Optional[BlockSpec] = None
    value_evals: int = 0
    block_evals: int = 0
    _lock: threading.Lock = field(
        default_factory=threading.Lock, repr=False, compare=False
    )

    def _count(self, values: int, blockwise: int = 0) -> None:
        with self._lock:
            self.value_evals += values
            self.block_evals += blockwise

    def reset_counters(self) -> None:
        with self._lock:
            self.value_evals = 0
            self.block_evals = 0


def _check_finite_value(v: float, x: np.ndarray) -> float:
    v = float(v)
    if not np.isfinite(v):
        raise EvaluationError("objective evaluated to a non-finite value", x)
    return v


def evaluate(oracle: ObjectiveOracle, x: np.ndarray) -> float:
    """Evaluate F(x), counting the evaluation on the oracle.

    Raises
    ------
    ValueError
        If ``x`` has the wrong length or non-finite coordinates.
    EvaluationError
        If F(x) is not finite.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (oracle.dim,):
        raise ValueError(f"expected a length-{oracle.dim} vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point has non-finite coordinates")
    v = _check_finite_value(oracle.fn(x), x)
    oracle._count(1)
    return v


def evaluate_batch(oracle: ObjectiveOracle, X: np.ndarray) -> np.ndarray:
    """Evaluate F on each row of X. Uses ``batch_fn`` when available."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != oracle.dim:
        raise ValueError(f"expected shape (k, {oracle.dim}), got {X.shape}")
    if oracle.batch_fn is not None:
        vals = np.asarray(oracle.batch_fn(X), dtype=float)
    else:
        vals = np.array([float(oracle.fn(row)) for row in X])
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise EvaluationError("objective evaluated to a non-finite value", X[bad])
    oracle._count(len(vals))
    return vals


def substitute(x: np.ndarray, idx: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Copy of ``x`` with ``x[idx]`` replaced by ``z``."""
    y = np.array(x, dtype=float, copy=True)
    y[idx] = z
    return y


def evaluate_indices(
    oracle: ObjectiveOracle, x: np.ndarray, idx: np.ndarray, z: np.ndarray
) -> float:
    """Evaluate F at ``x`` with coordinates ``idx`` replaced by ``z``.

    Uses the oracle's partial evaluator when present, otherwise falls
    back to a full evaluation on a substituted copy. Either way the
    result equals ``evaluate(oracle, substitute(x, idx, z))``.
    """
    idx = np.asarray(idx, dtype=int)
    z = np.asarray(z, dtype=float)
    if oracle.partial_fn is not None:
        v = _check_finite_value(oracle.partial_fn(x, idx, z), substitute(x, idx, z))
        oracle._count(1, blockwise=1)
        return v
    y = substitute(x, idx, z)
    v = _check_finite_value(oracle.fn(y), y)
    oracle._count(1, blockwise=1)
    return v


def evaluate_indices_batch(
    oracle: ObjectiveOracle, x: np.ndarray, idx: np.ndarray, Z: np.ndarray
) -> np.ndarray:
    """Vectorized :func:`evaluate_indices` over the rows of ``Z``."""
    idx = np.asarray(idx, dtype=int)
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2 or Z.shape[1] != len(idx):
        raise ValueError(f"expected shape (k, {len(idx)}), got {Z.shape}")
    if oracle.partial_batch_fn is not None:
        vals = np.asarray(oracle.partial_batch_fn(x, idx, Z), dtype=float)
    elif oracle.partial_fn is not None:
        vals = np.array([float(oracle.partial_fn(x, idx, z)) for z in Z])
    else:
        vals = np.array([float(oracle.fn(substitute(x, idx, z))) for z in Z])
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise EvaluationError(
            "objective evaluated to a non-finite value", substitute(x, idx, Z[bad])
        )
    oracle._count(len(vals), blockwise=len(vals))
    return vals


def evaluate_block(
    oracle: ObjectiveOracle,
    x: np.ndarray,
    i: int,
    z_i: np.ndarray,
    blocks: Optional[BlockSpec] = None,
) -> float:
    """Evaluate F with block ``i`` replaced by ``z_i``, other blocks fixed.

    ``blocks`` defaults to the oracle's own block structure; a
    whole-space single block is assumed when neither is given and
    ``i == 0``.
    """
    spec = blocks if blocks is not None else oracle.blocks
    if spec is None:
        spec = BlockSpec.whole(oracle.dim)
    if not (0 <= i < spec.s):
        raise ValueError(f"block index {i} out of range for {spec.s} blocks")
    z_i = np.atleast_1d(np.asarray(z_i, dtype=float))
    if z_i.shape != (spec.length(i),):
        raise ValueError(
            f"block {i} has length {spec.length(i)}, got value of shape {z_i.shape}"
        )
    return evaluate_indices(oracle, x, spec.indices(i), z_i)


def finite_difference_gradient(
    oracle: ObjectiveOracle, x: np.ndarray, h: float = 1e-5
) -> np.ndarray:
    """Central-difference gradient, component j = (F(x+he_j)-F(x-he_j))/2h."""
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for j in range(len(x)):
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        g[j] = (evaluate(oracle, xp) - evaluate(oracle, xm)) / (2.0 * h)
    return g


@dataclass
class EscapeEvent:
    """One accepted inspection escape.

    ``block`` is None for a whole-space inspection, an int for a cyclic
    block scheme, and an ``(i, j)`` index pair for sparse-pair schemes.
    ``samples_consumed`` is the 1-based position of the accepted sample
    in the deterministic sample order (batch evaluation does not change
    it). ``radius`` is the sampler's nominal ring radius at the escape.
    """

    outer_iter: int
    block: Union[None, int, tuple]
    radius: float
    samples_consumed: int
    value_before: float
    value_after: float


@dataclass
class RunTrace:
    """History of a run (and optionally its inspections).

    ``iterates`` rows are ``(phase, k, value)`` with phase ``"run"`` or
    ``"inspect"``; values at accepted points never increase, and drop by
    more than the inspection threshold across each escape event.
    ``points`` mirrors ``iterates`` with the iterate vectors when the
    producer recorded them (runners do so only on request; a long run
    over a wide vector would otherwise hoard memory).
    """

    iterates: list = field(default_factory=list)
    points: list = field(default_factory=list)
    escape_events: list = field(default_factory=list)
    final_point: Optional[np.ndarray] = None
    final_value: Optional[float] = None
    certificate: Optional[object] = None
    status: str = "ok"
    value_evals: int = 0
    block_evals: int = 0

    def record(
        self, phase: str, k: int, value: float, point: Optional[np.ndarray] = None
    ) -> None:
        self.iterates.append((phase, k, float(value)))
        if point is not None:
            self.points.append(np.array(point, dtype=float, copy=True))

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, _, v in self.iterates])

    @property
    def has_points(self) -> bool:
        """True when every iterate row has a recorded point."""
        return len(self.points) == len(self.iterates)

    @property
    def n_iterations(self) -> int:
        return len(self.iterates)
