"""
The run-and-inspect orchestrator.

``run_and_inspect`` alternates a descent runner with ball inspection:
run to stagnation, inspect the stagnation point, resume from the escape
sample if one is found, stop when an inspection certifies the point.
Each escape lowers the objective by more than ``policy.nu``, so for an
objective bounded below the number of outer rounds is at most
(F(x0) - inf F) / nu; a ``max_outer`` guard backs that argument up.
"""

from __future__ import annotations

from typing import Callable, Optional, Tuple

import numpy as np

from runinspect.core import BlockSpec, EscapeEvent, ObjectiveOracle, RunTrace
from runinspect.inspection import (
    InspectionCertificate,
    InspectionPolicy,
    inspect_point,
)

Runner = Callable[[np.ndarray], RunTrace]


def _append_segment(trace: RunTrace, segment: RunTrace, k_start: int) -> int:
    """Stitch a runner segment onto the master trace, renumbering."""
    k = k_start
    has_points = len(segment.points) == len(segment.iterates)
    for pos, (phase, _, value) in enumerate(segment.iterates):
        point = segment.points[pos] if has_points else None
        trace.record(phase, k, value, point=point)
        k += 1
    return k


def run_and_inspect(
    run: Runner,
    oracle: ObjectiveOracle,
    x0,
    policy: InspectionPolicy,
    blocks: Optional[BlockSpec] = None,
    max_outer: int = 10_000,
) -> Tuple[np.ndarray, RunTrace, Optional[InspectionCertificate]]:
    """Alternate ``run`` and inspection until a certificate (or a guard).

    Parameters
    ----------
    run : callable
        Maps a start point to a :class:`RunTrace`; must be a descent
        method (or carry its own divergence guard, reported through the
        segment status).
    oracle : ObjectiveOracle
        The objective being minimized; inspections evaluate through it.
    x0 : array_like
        Start point.
    policy : InspectionPolicy
        What to sample and the escape threshold nu.
    blocks : BlockSpec, optional
        Block structure for cyclic blockwise inspection; defaults to the
        oracle's own blocks, else the whole space.
    max_outer : int
        Hard cap on escape rounds.

    Returns
    -------
    (final_point, trace, certificate)
        ``certificate`` is None when a runner divergence guard tripped
        or ``max_outer`` was hit; the trace status says which. The trace
        contains every run segment, every escape event, and the oracle
        evaluation counts consumed by the whole loop.
    """
    x = np.asarray(x0, dtype=float).copy()
    trace = RunTrace()
    ev0, bv0 = oracle.value_evals, oracle.block_evals
    certificate: Optional[InspectionCertificate] = None
    k = 0
    outer = 0
    while True:
        segment = run(x)
        k = _append_segment(trace, segment, k)
        x = np.asarray(segment.final_point, dtype=float).copy()
        if segment.status == "diverged":
            trace.status = "diverged"
            trace.final_value = segment.final_value
            break
        result = inspect_point(oracle, x, policy, blocks)
        if isinstance(result, InspectionCertificate):
            certificate = result
            trace.certificate = result
            trace.status = "certified"
            trace.final_value = result.center_value
            break
        trace.escape_events.append(
            EscapeEvent(
                outer_iter=outer,
                block=result.block,
                radius=result.radius,
                samples_consumed=result.samples_consumed,
                value_before=result.center_value,
                value_after=result.value,
            )
        )
        trace.record("inspect", k, result.value, point=result.point)
        k += 1
        x = np.asarray(result.point, dtype=float).copy()
        outer += 1
        if outer >= max_outer:
            trace.status = "max_outer_reached"
            trace.final_value = result.value
            break
    trace.final_point = x
    trace.value_evals = oracle.value_evals - ev0
    trace.block_evals = oracle.block_evals - bv0
    return x, trace, certificate


def run_and_inspect_blockwise(
    run: Runner,
    oracle: ObjectiveOracle,
    x0,
    policy: InspectionPolicy,
    blocks: Optional[BlockSpec] = None,
    max_outer: int = 10_000,
) -> Tuple[np.ndarray, RunTrace, Optional[tuple]]:
    """Blockwise variant: per-block balls, per-block certificates.

    Identical control flow to :func:`run_and_inspect` (with a single
    whole-space block the two are the same function); an escape replaces
    exactly one block of the stagnation point. Returns the per-block
    certificate tuple instead of the combined certificate, None under a
    guard trip.
    """
    if policy.block_rule == "sparse-pairs":
        spec = None
    else:
        spec = blocks if blocks is not None else oracle.blocks
        if spec is None:
            spec = BlockSpec.whole(oracle.dim)
    x, trace, certificate = run_and_inspect(
        run, oracle, x0, policy, blocks=spec, max_outer=max_outer
    )
    if certificate is None:
        return x, trace, None
    return x, trace, certificate.per_block()
