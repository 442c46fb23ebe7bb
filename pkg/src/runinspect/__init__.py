"""
runinspect: descent solvers coupled with ball-sampling inspections.

The library alternates two phases. A "run" phase applies any monotone
descent solver until it stagnates. An "inspect" phase then samples a ball
around the stagnation point from the outside in; the first sample that
improves the objective by more than a threshold ``nu`` restarts the run
phase from that sample, and if no sample improves, the point is returned
together with a certificate that it is an approximate (blockwise) R-local
minimizer at the sampled resolution.

Layout
------
core
    Objective-oracle abstraction, block structure, evaluation counters.
sampling
    Deterministic sample-point generators (rings, two-angle 4-D rings,
    axis lines, grid nets, sparse index pairs).
inspection
    The inspection engine and its certificates.
runners
    The descent solvers (gradient descent, block coordinate descent,
    Lloyd k-means, IRLS with Tukey weights, half-threshold coordinate
    descent, iterative half thresholding, prox-linear with MCP) plus
    the scalar operators they use.
meta
    The run-and-inspect orchestrator.
problems
    Benchmark objectives and seeded data generators.
theory
    Executable optimality bounds and a brute-force ball verifier.
kernels
    Hot numeric loops with a numba backend and a pure-numpy fallback,
    selected by the RUNINSPECT_BACKEND environment variable.
cli
    Command-line experiment harness (see ``runinspect --help``).
"""

from runinspect.core import (
    BlockSpec,
    EvaluationError,
    ObjectiveOracle,
    RunTrace,
    evaluate,
    evaluate_block,
    finite_difference_gradient,
)
from runinspect.inspection import (
    EscapeFound,
    InspectionCertificate,
    InspectionPolicy,
    inspect_point,
)
from runinspect.meta import run_and_inspect, run_and_inspect_blockwise
from runinspect.runners import RunnerConfig

__version__ = "0.1.0"

__all__ = [
    "BlockSpec",
    "EscapeFound",
    "EvaluationError",
    "InspectionCertificate",
    "InspectionPolicy",
    "ObjectiveOracle",
    "RunTrace",
    "RunnerConfig",
    "evaluate",
    "evaluate_block",
    "finite_difference_gradient",
    "inspect_point",
    "run_and_inspect",
    "run_and_inspect_blockwise",
]
