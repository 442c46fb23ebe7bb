"""Shared fixtures and independent brute-force oracles.

The oracles here deliberately avoid the package's own closed forms:
scalar prox maps are checked against dense 1-D grid minimization plus
local refinement, so a bug in a closed form cannot hide behind itself.
"""

import numpy as np
import pytest

from runinspect.core import BlockSpec, ObjectiveOracle


def brute_force_scalar_min(g, lo: float, hi: float, coarse: int = 40001,
                           refine_rounds: int = 30) -> float:
    """Argmin of g over [lo, hi] by dense grid + interval shrinking."""
    xs = np.linspace(lo, hi, coarse)
    vals = np.array([g(x) for x in xs])
    i = int(np.argmin(vals))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, len(xs) - 1)]
    for _ in range(refine_rounds):
        xs = np.linspace(a, b, 41)
        vals = np.array([g(x) for x in xs])
        i = int(np.argmin(vals))
        a = xs[max(i - 1, 0)]
        b = xs[min(i + 1, len(xs) - 1)]
    return float(xs[i])


def quadratic_oracle(n: int = 2) -> ObjectiveOracle:
    """F(x) = 0.5 ||x||^2 with analytic gradient and batch path."""
    return ObjectiveOracle(
        dim=n,
        fn=lambda x: 0.5 * float(x @ x),
        grad=lambda x: np.asarray(x, dtype=float),
        batch_fn=lambda X: 0.5 * np.einsum("ij,ij->i", X, X),
    )


@pytest.fixture
def quad2():
    return quadratic_oracle(2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def assert_monotone(values, slack: float = 1e-12):
    v = np.asarray(values, dtype=float)
    rises = np.diff(v) > slack
    assert not rises.any(), f"objective rose at steps {np.flatnonzero(rises)}"


def uniform_blocks(n: int, block_len: int) -> BlockSpec:
    return BlockSpec.uniform(n, block_len)
