"""
Executable optimality bounds and a brute-force ball verifier.

The bounds all concern an implicit decomposition F = f + r where f is
smooth (gradient Lipschitz constant L) and gradient-dominated (PL
constant mu), and r is the rough part, varying at most
alpha*||x - y|| + 2*beta between any two points. The decomposition is
an analysis device: solvers never see it. This module makes the bounds
executable so constructed instances with known constants can certify
that inspection's output actually lands inside them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from runinspect.core import ObjectiveOracle, evaluate, evaluate_batch
from runinspect.sampling import grid_net_samples


def prop1_escape_radius(a: float, b: float) -> float:
    """Escape radius min(2 sqrt(a), 2/b) for the quad-sine landscape.

    A ball of at least this radius around any non-global local
    minimizer of x^2/2 + a sin(b pi (x - 1/(2b))) + a contains a point
    with a strictly smaller objective.
    """
    if a < 0 or b <= 0:
        raise ValueError("need a >= 0 and b > 0")
    return min(2.0 * np.sqrt(a), 2.0 / b)


def delta_R_local(alpha: float, beta: float, L: float, R: float) -> float:
    """Gradient bound alpha + max(4 beta / R, 2 sqrt(beta L)) at an R-local minimizer.

    R = inf is supported (the 4 beta / R term vanishes).
    """
    _check_nonneg(alpha=alpha, beta=beta, L=L)
    if R <= 0:
        raise ValueError("R must be positive")
    ratio = 0.0 if np.isinf(R) else 4.0 * beta / R
    return alpha + max(ratio, 2.0 * np.sqrt(beta * L))


def delta_blockwise(
    alpha: float, beta: float, L: float, R_vec: Sequence[float]
) -> Tuple[float, float]:
    """Blockwise gradient bound (exact norm, simplified sqrt(s) form).

    v_i = alpha + max(4 beta / R_i, 2 sqrt(beta L)) per block; the exact
    bound is ||v||. The simplified form replaces every radius by the
    smallest one: sqrt(s) * (alpha + max(4 beta / min R_i, 2 sqrt(beta L))).
    """
    R_vec = np.asarray(R_vec, dtype=float)
    if R_vec.ndim != 1 or len(R_vec) < 1:
        raise ValueError("R_vec must be a nonempty vector of radii")
    v = np.array([delta_R_local(alpha, beta, L, R) for R in R_vec])
    simplified = np.sqrt(len(R_vec)) * delta_R_local(
        alpha, beta, L, float(np.min(R_vec))
    )
    return float(np.linalg.norm(v)), float(simplified)


def theorem1_bounds(
    delta: float, mu: float, alpha: float = 0.0, beta: float = 0.0, M: float = 0.0
) -> Tuple[float, float]:
    """(objective-gap bound, distance bound) for a point with ||grad f|| <= delta.

    Distance to the solution set: 2 delta / mu + M. Objective gap:
    (delta^2 + 2 alpha delta)/mu + alpha M + 2 beta in general; when
    alpha = 0 the tighter delta^2/(2 mu) + 2 beta applies and is
    returned.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    _check_nonneg(delta=delta, alpha=alpha, beta=beta, M=M)
    dist = 2.0 * delta / mu + M
    gap = (delta * delta + 2.0 * alpha * delta) / mu + alpha * M + 2.0 * beta
    if alpha == 0.0:
        gap = min(gap, delta * delta / (2.0 * mu) + 2.0 * beta)
    return gap, dist


def eta_certificate(
    nu: float, L_bar: float, alpha: float, beta: float, rbar: float
) -> float:
    """Certificate slack eta = nu + (L_bar + alpha) rbar + 2 beta.

    An exhaustive inspection at sample density rbar and threshold nu
    certifies R-local minimality up to this eta.
    """
    _check_nonneg(nu=nu, L_bar=L_bar, alpha=alpha, beta=beta, rbar=rbar)
    return nu + (L_bar + alpha) * rbar + 2.0 * beta


def prop2_escape_gradient(
    L_i: float, alpha: float, beta: float, nu: float, rbar: float
) -> float:
    """Smooth-gradient size guaranteeing an escape sample exists.

    If the block gradient of f exceeds
    (9/2) L_i rbar + 3 alpha + (2 beta + nu)/rbar, a ball of radius at
    least 2 rbar around the point contains a sample improving F by more
    than nu (valid for sample densities rbar <= R_i / 2).
    """
    _check_nonneg(L_i=L_i, alpha=alpha, beta=beta, nu=nu)
    if rbar <= 0:
        raise ValueError("rbar must be positive")
    return 4.5 * L_i * rbar + 3.0 * alpha + (2.0 * beta + nu) / rbar


def approx_blockwise_delta(
    etas: Sequence[float],
    R_vec: Sequence[float],
    alpha: float,
    beta: float,
    L: float,
) -> float:
    """Gradient bound at an approximate blockwise R-local minimizer.

    ||v|| with v_i = alpha + max((4 beta + 2 eta_i)/R_i,
    sqrt((4 beta + 2 eta_i) L)); with eta_i = 0 this reduces to the
    exact blockwise bound.
    """
    etas = np.asarray(etas, dtype=float)
    R_vec = np.asarray(R_vec, dtype=float)
    if etas.shape != R_vec.shape:
        raise ValueError("need one eta per radius")
    _check_nonneg(alpha=alpha, beta=beta, L=L)
    if np.any(etas < 0) or np.any(R_vec <= 0):
        raise ValueError("need etas >= 0 and radii > 0")
    width = 4.0 * beta + 2.0 * etas
    v = alpha + np.maximum(width / R_vec, np.sqrt(width * L))
    return float(np.linalg.norm(v))


def theorem3_global_radius(
    mu: float, L: float, alpha: float, beta: float, M: float
) -> float:
    """Radius beyond which R-local minimality implies global minimality.

    2 (alpha + 2 sqrt(beta L)) / mu + M; inspecting with any R at least
    this large leaves nowhere for a non-global certified point to hide.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    _check_nonneg(L=L, alpha=alpha, beta=beta, M=M)
    return 2.0 * (alpha + 2.0 * np.sqrt(beta * L)) / mu + M


def _check_nonneg(**kwargs):
    for name, val in kwargs.items():
        if val < 0:
            raise ValueError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class BruteForceReport:
    """Outcome of a dense-grid scan of one ball."""

    certified: bool
    counterexample: Optional[np.ndarray]
    best_value: float
    center_value: float
    samples: int


def verify_R_local_bruteforce(
    oracle: ObjectiveOracle,
    x_center,
    R: float,
    rbar: float,
    tol: float = 1e-9,
    cap: int = 10_000_000,
) -> BruteForceReport:
    """Scan a dense grid net of B(center, R) for any point beating the center.

    Returns certified=True when no probe dips below F(center) - tol at
    the probe resolution, otherwise the best violating point (ties go
    to the lexicographically smallest probe). Dimensions above 3 are
    refused; the grid cost is exponential.
    """
    if oracle.dim > 3:
        raise ValueError("brute-force verification is limited to dimension <= 3")
    x_center = np.asarray(x_center, dtype=float)
    fc = evaluate(oracle, x_center)
    samples = grid_net_samples(x_center, R, rbar, cap=cap)
    best_value = np.inf
    best_point = None
    chunk = 65536
    for start in range(0, len(samples), chunk):
        block = samples[start : start + chunk]
        vals = evaluate_batch(oracle, block)
        low = float(np.min(vals))
        if low > best_value:
            continue
        # tie rule: among equal values keep the lexicographically smallest point
        cand = min(tuple(p) for p in block[vals == low])
        if low < best_value or (best_point is not None and cand < tuple(best_point)):
            best_value = low
            best_point = np.array(cand)
    if best_value < fc - tol:
        return BruteForceReport(
            certified=False,
            counterexample=np.array(best_point, copy=True),
            best_value=best_value,
            center_value=fc,
            samples=len(samples),
        )
    return BruteForceReport(
        certified=True,
        counterexample=None,
        best_value=best_value,
        center_value=fc,
        samples=len(samples),
    )


@dataclass
class DecomposedObjective:
    """F = f + r with the constants the bounds need.

    Fields
    ------
    f : ObjectiveOracle
        Smooth part, must carry a gradient.
    r_fn : callable
        Rough part, maps a point to a float.
    mu, L : float
        PL and gradient-Lipschitz constants of f.
    alpha, beta : float
        Variation bounds of r: |r(x) - r(y)| <= alpha ||x-y|| + 2 beta.
    M : float
        Diameter bound of the relevant solution sets.
    f_star, F_star : float
        Minimum of f and of F.
    minimizer : ndarray
        A global minimizer of F (distance measurements use it).
    full : ObjectiveOracle, optional
        Independently implemented F, checked against f + r pointwise.
    """

    f: ObjectiveOracle
    r_fn: Callable[[np.ndarray], float]
    mu: float
    L: float
    alpha: float
    beta: float
    M: float
    f_star: float
    F_star: float
    minimizer: np.ndarray
    full: Optional[ObjectiveOracle] = None

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.f.fn(x)) + float(self.r_fn(x))

    def oracle(self) -> ObjectiveOracle:
        """F as an oracle (the provided one, else the f + r sum)."""
        if self.full is not None:
            return self.full
        return ObjectiveOracle(dim=self.f.dim, fn=lambda x: self.value(x))

    def validate(
        self, seed: int = 0, n_probes: int = 200, box: float = 5.0
    ) -> dict:
        """Probe the declared structure; returns worst-case violations.

        Checks, over random probes in [-box, box]^dim: the decomposition
        (when ``full`` is given), the PL inequality
        0.5 ||grad f||^2 >= mu (f - f_star), and the r-variation bound
        on probe pairs. All three entries should be <= ~1e-12 for a
        correctly constructed instance.
        """
        rng = np.random.default_rng(seed)
        P = -box + 2 * box * rng.random((n_probes, self.f.dim))
        split_viol = 0.0
        pl_viol = 0.0
        for x in P:
            fx = float(self.f.fn(x))
            if self.full is not None:
                split_viol = max(
                    split_viol, abs(float(self.full.fn(x)) - fx - float(self.r_fn(x)))
                )
            g = np.asarray(self.f.grad(x), dtype=float)
            pl_viol = max(pl_viol, self.mu * (fx - self.f_star) - 0.5 * float(g @ g))
        r_viol = 0.0
        for x, y in zip(P, P[::-1]):
            gap = abs(float(self.r_fn(x)) - float(self.r_fn(y)))
            r_viol = max(
                r_viol,
                gap - self.alpha * float(np.linalg.norm(x - y)) - 2.0 * self.beta,
            )
        return {
            "decomposition": split_viol,
            "pl": max(pl_viol, 0.0),
            "r_growth": max(r_viol, 0.0),
        }


@dataclass(frozen=True)
class CertificationReport:
    """Measured quantities vs their bounds at a certified point."""

    grad_norm: float
    delta_bound: float
    grad_ok: bool
    gap: float
    gap_bound: float
    gap_ok: bool
    distance: float
    distance_bound: float
    distance_ok: bool
    passed: bool

    def as_dict(self) -> dict:
        return {
            "grad_norm": self.grad_norm,
            "delta_bound": self.delta_bound,
            "grad_ok": self.grad_ok,
            "gap": self.gap,
            "gap_bound": self.gap_bound,
            "gap_ok": self.gap_ok,
            "distance": self.distance,
            "distance_bound": self.distance_bound,
            "distance_ok": self.distance_ok,
            "passed": self.passed,
        }


def certify_decomposition(
    decomp: DecomposedObjective, x_center, R: float, slack: float = 1e-8
) -> CertificationReport:
    """Check the bound chain at a point already certified R-local.

    Measures ||grad f|| against the R-local gradient bound, then the
    objective gap and the distance to the known minimizer against the
    bounds that gradient level implies. ``slack`` absorbs float noise;
    a failing line on a genuinely certified point means the declared
    constants are wrong.
    """
    x_center = np.asarray(x_center, dtype=float)
    grad_norm = float(np.linalg.norm(decomp.f.grad(x_center)))
    delta = delta_R_local(decomp.alpha, decomp.beta, decomp.L, R)
    gap_bound, dist_bound = theorem1_bounds(
        delta, decomp.mu, decomp.alpha, decomp.beta, decomp.M
    )
    gap = decomp.value(x_center) - decomp.F_star
    dist = float(np.linalg.norm(x_center - decomp.minimizer))
    grad_ok = grad_norm <= delta + slack
    gap_ok = gap <= gap_bound + slack
    dist_ok = dist <= dist_bound + slack
    return CertificationReport(
        grad_norm=grad_norm,
        delta_bound=delta,
        grad_ok=grad_ok,
        gap=gap,
        gap_bound=gap_bound,
        gap_ok=gap_ok,
        distance=dist,
        distance_bound=dist_bound,
        distance_ok=dist_ok,
        passed=grad_ok and gap_ok and dist_ok,
    )
