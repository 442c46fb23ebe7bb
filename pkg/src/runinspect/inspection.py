"""
Ball inspection: escape a stagnation point or certify it locally optimal.

Given a point ``x`` where a descent solver stalled, ``inspect_point``
streams deterministic sample points from balls around ``x`` (whole-space
or per coordinate block), outside-in, and stops at the FIRST sample ``y``
whose objective is strictly below ``F(x) - nu``. If every sample fails
that test, the point is returned with an :class:`InspectionCertificate`
stating that, at the sampled resolution, no ball point improves by more
than ``nu``: an approximate (blockwise) R-local minimality certificate.

Sample order is the contract. It is outside-in over the ring schedule,
then ascending angle (lexicographic for two angles), then block order;
sparse pairs are ordered by descending magnitude of the nonzero entry.
Batched evaluation never changes the outcome: the engine selects the
earliest improving sample in this order whether values are computed one
at a time or in vectorized groups.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from runinspect.core import (
    BlockSpec,
    ObjectiveOracle,
    evaluate,
    evaluate_indices,
    evaluate_indices_batch,
    substitute,
)
from runinspect.sampling import (
    angle_grid,
    grid_net_offsets,
    line1d_offsets,
    polar4d_offsets,
    radius_schedule,
    ring_offsets_2d,
    sparse_pair_blocks,
)

SAMPLERS = ("ring2d", "polar4d", "grid_net", "line1d")
BLOCK_RULES = ("all-blocks-cyclic", "sparse-pairs")

# Sampler subspace dimensions; grid nets work in any dimension.
_SAMPLER_DIM = {"ring2d": 2, "polar4d": 4, "line1d": 1}


@dataclass(frozen=True)
class EtaConstants:
    """Smoothness constants turning a certificate into a bound.

    ``L_bar`` is the gradient Lipschitz constant of the smooth part on
    the inspected ball (scalar, or one value per block); ``alpha`` and
    ``beta`` bound the objective's rough part. When supplied on a
    policy, certificates carry eta = nu + (L_bar + alpha)*rbar + 2*beta.
    """

    L_bar: Union[float, Tuple[float, ...]]
    alpha: float = 0.0
    beta: float = 0.0


@dataclass(frozen=True)
class InspectionPolicy:
    """What to sample and when to accept an escape.

    Parameters
    ----------
    R : float or sequence of float
        Ball radius; a sequence gives one radius per block.
    dR : float
        Ring decrement, 0 < dR <= min(R). Rings run outside-in and stop
        before radius zero; the center is never re-sampled.
    nu : float
        Descent threshold; a sample y escapes iff F(y) < F(x) - nu,
        strictly. Ties never escape.
    sampler : str
        One of ring2d, polar4d, grid_net, line1d. The sampler must match
        the block dimension (2, 4, any, 1 respectively).
    dtheta : float or (float, float)
        Angle step; a pair gives the two polar4d steps. The step count
        per turn is ceil(2*pi/dtheta).
    block_rule : str
        all-blocks-cyclic inspects each block of ``blocks`` in turn
        (whole-space when there is a single block); sparse-pairs builds
        2-D subspaces from (nonzero, zero) coordinate pairs of x.
    rbar : float, optional
        Grid-net density (grid_net sampler only).
    pair_tol : float
        Magnitude below which a coordinate counts as zero for pairing.
    grid_cap : int
        Maximum grid-net size before refusing (dimension too high).
    batch : bool
        Evaluate samples in vectorized groups. Results are identical to
        sequential evaluation; only evaluation counts can differ.
    constants : EtaConstants, optional
        When present (and the sampler has a density), certificates get
        the derived tolerance eta.
    """

    R: Union[float, Tuple[float, ...]]
    dR: float
    nu: float
    sampler: str = "ring2d"
    dtheta: Union[float, Tuple[float, float]] = np.pi / 10.0
    block_rule: str = "all-blocks-cyclic"
    rbar: Optional[float] = None
    pair_tol: float = 1e-8
    grid_cap: int = 10_000_000
    batch: bool = True
    constants: Optional[EtaConstants] = None

    def __post_init__(self):
        if self.sampler not in SAMPLERS:
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.block_rule not in BLOCK_RULES:
            raise ValueError(f"unknown block rule {self.block_rule!r}")
        if self.nu <= 0:
            raise ValueError("descent threshold nu must be positive")
        rmin = min(self._radii_tuple())
        if not (0 < self.dR <= rmin):
            raise ValueError("need 0 < dR <= every block radius")
        if self.sampler == "grid_net":
            if self.rbar is None or not (0 < self.rbar <= rmin):
                raise ValueError("grid_net requires 0 < rbar <= every radius")
        if self.block_rule == "sparse-pairs":
            if self.sampler != "ring2d":
                raise ValueError("sparse-pairs inspection samples 2-D rings")
            if not np.isscalar(self.R):
                raise ValueError("sparse-pairs uses a single scalar radius")

    def _radii_tuple(self) -> Tuple[float, ...]:
        if np.isscalar(self.R):
            return (float(self.R),)
        return tuple(float(r) for r in self.R)

    def radius_for(self, unit: int, n_units: int) -> float:
        radii = self._radii_tuple()
        if len(radii) == 1:
            return radii[0]
        if len(radii) != n_units:
            raise ValueError(
                f"policy has {len(radii)} radii but inspection has {n_units} blocks"
            )
        return radii[unit]

    def angles(self) -> Tuple[np.ndarray, np.ndarray]:
        if isinstance(self.dtheta, (tuple, list)):
            d1, d2 = self.dtheta
        else:
            d1 = d2 = float(self.dtheta)
        return angle_grid(d1), angle_grid(d2)


@dataclass(frozen=True)
class BlockCertificate:
    """Per-block slice of a certificate."""

    block: Union[None, int, Tuple[int, int]]
    radius: float
    rbar: Optional[float]
    eta: Optional[float]


@dataclass(frozen=True)
class InspectionCertificate:
    """Exhaustive-sampling certificate of approximate R-local minimality.

    Produced only when every generated sample y satisfied
    F(y) >= F(center) - nu. ``rbar`` is the sample density (max distance
    from any ball point to the nearest sample or the center) when the
    sampler provides one: exactly dR/2 for line1d, the policy density
    for grid_net, and the conservative ring bound
    sqrt((dR/2)**2 + (2*R*sin(dtheta/4))**2) for ring2d. The polar4d
    two-angle rings do not cover the 4-D ball, so they carry no density
    and no eta. ``eta`` appears when the policy supplied constants:
    eta = nu + (L_bar + alpha)*rbar + 2*beta, per block.
    """

    center: np.ndarray
    center_value: float
    radii: Tuple[float, ...]
    nu: float
    samples_evaluated: int
    block_rule: str
    sampler: str
    dR: float
    dtheta: Optional[Tuple[float, float]]
    rbar: Optional[Tuple[Optional[float], ...]] = None
    eta: Optional[Tuple[Optional[float], ...]] = None
    block_markers: Tuple = (None,)
    n_pairs: Optional[int] = None

    def per_block(self) -> Tuple[BlockCertificate, ...]:
        out = []
        for u, marker in enumerate(self.block_markers):
            out.append(
                BlockCertificate(
                    block=marker,
                    radius=self.radii[u],
                    rbar=None if self.rbar is None else self.rbar[u],
                    eta=None if self.eta is None else self.eta[u],
                )
            )
        return tuple(out)


@dataclass(frozen=True)
class EscapeFound:
    """First sample that beat the center by more than nu."""

    point: np.ndarray
    value: float
    center_value: float
    block: Union[None, int, Tuple[int, int]]
    radius: float
    samples_consumed: int


def _ring2d_rbar(R: float, dR: float, dtheta: float) -> float:
    # Nearest ring radius is within dR/2 (center covers the innermost
    # gap); nearest angle within dtheta/2, whose chord at radius <= R is
    # at most 2*R*sin(dtheta/4).
    return float(np.hypot(dR / 2.0, 2.0 * R * np.sin(dtheta / 4.0)))


def _resolve_units(oracle, x, policy, blocks):
    """Inspection units: list of (marker, index array)."""
    if policy.block_rule == "sparse-pairs":
        pairs = sparse_pair_blocks(x, tol=policy.pair_tol)
        return [((i, j), np.array([i, j])) for i, j in pairs]
    spec = blocks if blocks is not None else oracle.blocks
    if spec is None:
        spec = BlockSpec.whole(oracle.dim)
    if spec.s == 1:
        return [(None, spec.indices(0))]
    return [(i, spec.indices(i)) for i in range(spec.s)]


def _unit_offsets(policy, r: float, dim: int) -> np.ndarray:
    """Offsets of one ring at nominal radius r in a dim-D subspace."""
    if policy.sampler == "ring2d":
        a1, _ = policy.angles()
        return ring_offsets_2d(r, a1)
    if policy.sampler == "polar4d":
        a1, a2 = policy.angles()
        return polar4d_offsets(r, a1, a2)
    if policy.sampler == "line1d":
        return line1d_offsets(r)
    raise AssertionError("ring offsets requested for a non-ring sampler")


def _check_sampler_dims(policy, units):
    want = _SAMPLER_DIM.get(policy.sampler)
    if want is None:
        return
    for marker, idx in units:
        if len(idx) != want:
            raise ValueError(
                f"sampler {policy.sampler} needs {want}-D blocks, "
                f"got block {marker!r} of size {len(idx)}"
            )


def _certificate(policy, units, x, fx, total):
    n_units = len(units)
    markers = tuple(marker for marker, _ in units)
    radii = tuple(policy.radius_for(u, n_units) for u in range(n_units))
    if isinstance(policy.dtheta, (tuple, list)):
        dtheta = (float(policy.dtheta[0]), float(policy.dtheta[1]))
    else:
        dtheta = (float(policy.dtheta), float(policy.dtheta))

    rbar: Optional[Tuple[Optional[float], ...]]
    if policy.sampler == "line1d":
        rbar = tuple(policy.dR / 2.0 for _ in radii)
    elif policy.sampler == "grid_net":
        rbar = tuple(float(policy.rbar) for _ in radii)
    elif policy.sampler == "ring2d":
        rbar = tuple(_ring2d_rbar(R, policy.dR, dtheta[0]) for R in radii)
    else:
        rbar = None

    eta: Optional[Tuple[Optional[float], ...]] = None
    if policy.constants is not None and rbar is not None:
        c = policy.constants
        if np.isscalar(c.L_bar):
            lbars = [float(c.L_bar)] * n_units
        else:
            lbars = [float(v) for v in c.L_bar]
            if len(lbars) != n_units:
                raise ValueError(
                    f"{len(lbars)} L_bar constants for {n_units} blocks"
                )
        eta = tuple(
            policy.nu + (lb + c.alpha) * rb + 2.0 * c.beta
            for lb, rb in zip(lbars, rbar)
        )

    return InspectionCertificate(
        center=np.array(x, copy=True),
        center_value=fx,
        radii=radii,
        nu=policy.nu,
        samples_evaluated=total,
        block_rule=policy.block_rule,
        sampler=policy.sampler,
        dR=float(policy.dR),
        dtheta=None if policy.sampler == "grid_net" else dtheta,
        rbar=rbar,
        eta=eta,
        block_markers=markers,
        n_pairs=len(units) if policy.block_rule == "sparse-pairs" else None,
    )


def _scan_grid_net(oracle, x, policy, units, threshold, fx):
    """Grid-net streams: per unit, the whole net in order, chunked."""
    total = 0
    n_units = len(units)
    for u, (marker, idx) in enumerate(units):
        R = policy.radius_for(u, n_units)
        offs = grid_net_offsets(len(idx), R, policy.rbar, cap=policy.grid_cap)
        base = x[idx]
        chunk = 4096 if policy.batch else 1
        for start in range(0, len(offs), chunk):
            Z = base[None, :] + offs[start : start + chunk]
            if policy.batch:
                vals = evaluate_indices_batch(oracle, x, idx, Z)
            else:
                vals = np.array([evaluate_indices(oracle, x, idx, Z[0])])
            hits = np.flatnonzero(vals < threshold)
            if len(hits):
                h = int(hits[0])
                y = substitute(x, idx, Z[h])
                return EscapeFound(
                    point=y,
                    value=float(vals[h]),
                    center_value=fx,
                    block=marker,
                    radius=float(np.linalg.norm(offs[start + h])),
                    samples_consumed=total + start + h + 1,
                )
        total += len(offs)
    return _certificate(policy, units, x, fx, total)


def _scan_rings(oracle, x, policy, units, threshold, fx):
    """Ring streams: ring step, then angle, then block."""
    n_units = len(units)
    radii = [policy.radius_for(u, n_units) for u in range(n_units)]
    steps = [len(radius_schedule(R, policy.dR)) for R in radii]
    total = 0
    for k in range(max(steps)):
        active = [u for u in range(n_units) if k < steps[u]]
        ring_r = {u: radii[u] - k * policy.dR for u in active}
        offsets = {
            u: _unit_offsets(policy, ring_r[u], len(units[u][1])) for u in active
        }
        n_angles = len(offsets[active[0]])

        if policy.batch:
            vals = {}
            for u in active:
                _, idx = units[u]
                Z = x[idx][None, :] + offsets[u]
                vals[u] = evaluate_indices_batch(oracle, x, idx, Z)
            for a in range(n_angles):
                for pos, u in enumerate(active):
                    if vals[u][a] < threshold:
                        marker, idx = units[u]
                        y = substitute(x, idx, x[idx] + offsets[u][a])
                        return EscapeFound(
                            point=y,
                            value=float(vals[u][a]),
                            center_value=fx,
                            block=marker,
                            radius=float(ring_r[u]),
                            samples_consumed=total + a * len(active) + pos + 1,
                        )
        else:
            for a in range(n_angles):
                for pos, u in enumerate(active):
                    marker, idx = units[u]
                    z = x[idx] + offsets[u][a]
                    v = evaluate_indices(oracle, x, idx, z)
                    if v < threshold:
                        return EscapeFound(
                            point=substitute(x, idx, z),
                            value=float(v),
                            center_value=fx,
                            block=marker,
                            radius=float(ring_r[u]),
                            samples_consumed=total + a * len(active) + pos + 1,
                        )
        total += n_angles * len(active)
    return _certificate(policy, units, x, fx, total)


def inspect_point(
    oracle: ObjectiveOracle,
    x: Sequence[float],
    policy: InspectionPolicy,
    blocks: Optional[BlockSpec] = None,
) -> Union[EscapeFound, InspectionCertificate]:
    """Inspect the ball(s) around x; escape or certify.

    Streams samples in the deterministic policy order and returns an
    :class:`EscapeFound` at the first sample y with
    F(y) < F(x) - policy.nu, or an :class:`InspectionCertificate` when
    the stream is exhausted. ``samples_consumed`` on an escape is the
    1-based position of the accepted sample in the sequential order,
    independent of batching.

    Raises
    ------
    EvaluationError
        If any sample evaluates to a non-finite value; inspection is
        aborted, never silently continued.
    """
    x = np.asarray(x, dtype=float)
    fx = evaluate(oracle, x)
    threshold = fx - policy.nu

    units = _resolve_units(oracle, x, policy, blocks)
    if not units:
        # Sparse pairing on a point with no (nonzero, zero) pair: the
        # sample set is empty, so the certificate is vacuously earned.
        return InspectionCertificate(
            center=np.array(x, copy=True),
            center_value=fx,
            radii=(),
            nu=policy.nu,
            samples_evaluated=0,
            block_rule=policy.block_rule,
            sampler=policy.sampler,
            dR=float(policy.dR),
            dtheta=None,
            rbar=None,
            eta=None,
            block_markers=(),
            n_pairs=0,
        )
    _check_sampler_dims(policy, units)

    if policy.sampler == "grid_net":
        return _scan_grid_net(oracle, x, policy, units, threshold, fx)
    return _scan_rings(oracle, x, policy, units, threshold, fx)
