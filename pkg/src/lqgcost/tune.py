"""Feedback-gain search on the analytic cost statistics.

The objective (mean or variance of the infinite-horizon cost) is evaluated
in closed form for each candidate gain by closing the loop and calling the
Lyapunov-route statistics, so a plain gradient descent with finite-difference
gradients and a backtracking line search is cheap and adequate.  Candidates
that fail to stabilize the shifted closed loop are treated as infinitely
bad, which confines the search to the stabilizing set without any
constraint machinery.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .cost_lyap import (
    CostStats,
    cost_stats_lyapunov,
    expected_cost_infinite,
    variance_cost_infinite,
)
from .exceptions import InfeasibleGainError
from .lqg import close_loop_full_state
from .systems import LqgPlant

__all__ = [
    "TuneOptions",
    "TuneResult",
    "evaluate_gain",
    "objective_value",
    "finite_difference_gradient",
    "minimize_variance",
]


@dataclass
class TuneOptions:
    """Options for :func:`minimize_variance`."""

    f0: np.ndarray
    objective: str = "variance"      # "mean" | "variance"
    step_tol: float = 1e-8
    grad_tol: float = 1e-4
    max_iter: int = 2000
    fd_step: float = 1e-4

    def __post_init__(self):
        self.f0 = np.asarray(self.f0, dtype=float)
        if self.objective not in ("mean", "variance"):
            raise ValueError(f"objective must be 'mean' or 'variance', got {self.objective!r}")
        if not (self.step_tol > 0 and self.grad_tol > 0 and self.fd_step > 0):
            raise ValueError("tolerances and fd_step must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be an integer >= 1, got {self.max_iter}")
        self.max_iter = int(self.max_iter)


@dataclass
class TuneResult:
    """Outcome of a gain search."""

    F: np.ndarray
    objective_value: float
    mean_at_F: float
    variance_at_F: float
    iterations: int
    converged: bool
    trace: list = field(default_factory=list)


def evaluate_gain(plant: LqgPlant, f, mu0, sigma0) -> CostStats:
    """Analytic infinite-horizon cost statistics of the loop closed with gain ``f``.

    Raises :class:`InfeasibleGainError` when ``f`` does not stabilize the
    exponent-shifted closed loop (the cost then diverges).
    """
    f = np.asarray(f, dtype=float)
    shifted = plant.shifted_drift() - plant.B @ f
    max_re = np.linalg.eigvals(shifted).real.max()
    if max_re >= 0.0:
        raise InfeasibleGainError(
            f"gain does not stabilize the shifted closed loop (max Re eig = {max_re:.4g})",
            conditions=[("A+1a-BF stable", False)],
        )
    sys, cost = close_loop_full_state(plant, f, mu0, sigma0)
    return cost_stats_lyapunov(sys, cost)


def objective_value(plant, f, mu0, sigma0, objective):
    """Objective at gain ``f``; +inf for infeasible (destabilizing) gains."""
    f = np.asarray(f, dtype=float)
    shifted = plant.shifted_drift() - plant.B @ f
    if np.linalg.eigvals(shifted).real.max() >= 0.0:
        return math.inf
    sys, cost = close_loop_full_state(plant, f, mu0, sigma0)
    if objective == "mean":
        return expected_cost_infinite(sys, cost)
    return variance_cost_infinite(sys, cost)


def finite_difference_gradient(func, f, fd_step, stencil=2):
    """Entrywise finite-difference gradient of ``func`` at gain matrix ``f``.

    ``stencil=2`` is the central difference; ``stencil=4`` the five-point
    formula (f(-2h) - 8f(-h) + 8f(h) - f(2h)) / 12h used for cross-checks.
    Steps scale per entry as fd_step * (1 + |f_ij|).
    """
    f = np.asarray(f, dtype=float)
    grad = np.zeros_like(f)
    for idx in np.ndindex(f.shape):
        h = fd_step * (1.0 + abs(f[idx]))

        def shifted(k):
            fs = f.copy()
            fs[idx] += k * h
            return func(fs)

        if stencil == 2:
            grad[idx] = (shifted(1) - shifted(-1)) / (2.0 * h)
        elif stencil == 4:
            grad[idx] = (shifted(-2) - 8.0 * shifted(-1) + 8.0 * shifted(1) - shifted(2)) / (12.0 * h)
        else:
            raise ValueError("stencil must be 2 or 4")
    return grad


def minimize_variance(plant: LqgPlant, mu0, sigma0, opts: TuneOptions) -> TuneResult:
    """Gradient descent on the chosen analytic objective over the gain entries.

    Starts from ``opts.f0`` (which must stabilize the shifted loop), takes
    steps along the normalized negative gradient with a halving line search
    that rejects non-decreasing or destabilizing candidates, and reports
    ``converged=True`` when the gradient norm drops below ``opts.grad_tol``.
    """

    def func(f):
        return objective_value(plant, f, mu0, sigma0, opts.objective)

    f = opts.f0.copy()
    value = func(f)
    if not math.isfinite(value):
        raise InfeasibleGainError("initial gain f0 does not stabilize the shifted closed loop")

    trace = [(0, value)]
    converged = False
    iterations = 0
    step_start = 1.0
    for iteration in range(1, opts.max_iter + 1):
        iterations = iteration
        grad = finite_difference_gradient(func, f, opts.fd_step)
        gnorm = float(np.linalg.norm(grad))
        if gnorm < opts.grad_tol:
            converged = True
            iterations = iteration - 1
            break
        direction = -grad / gnorm
        step = step_start
        new_value = math.inf
        while step >= opts.step_tol:
            candidate = f + step * direction
            new_value = func(candidate)
            if new_value < value:
                break
            step *= 0.5
        if not new_value < value:
            # no decrease found above the step tolerance: local flatness
            break
        f = f + step * direction
        value = new_value
        trace.append((iteration, value))
        # warm-start the next line search near the accepted step
        step_start = min(1.0, 4.0 * step)

    if not converged:
        grad = finite_difference_gradient(func, f, opts.fd_step)
        converged = float(np.linalg.norm(grad)) < opts.grad_tol

    stats = evaluate_gain(plant, f, mu0, sigma0)
    return TuneResult(
        F=f,
        objective_value=value,
        mean_at_F=stats.mean,
        variance_at_F=stats.variance,
        iterations=iterations,
        converged=converged,
        trace=trace,
    )
