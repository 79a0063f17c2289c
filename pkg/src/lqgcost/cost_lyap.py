"""Closed-form mean and variance of the quadratic cost via Lyapunov solutions.

Notation used throughout (all solved with :mod:`lqgcost.linalg`):

* ``A_k``      : A + k*alpha*I, the exponent-shifted drift,
* ``X[W; A_k]``: solution of  A_k X + X A_k^T + W = 0,
* ``Y[W; A_k]``: solution of  A_k^T Y + Y A_k + W = 0 (transposed equation),
* ``Y_T``      : the finite-horizon version integral_0^T e^{A_k^T t} W e^{A_k t} dt,
               obtained from Y via the exact identity Y_T = Y - e^{A_k^T T} Y e^{A_k T}.

Validity requirements (checked, and reported in ``conditions_checked``):

==================  =========================================
finite mean         A and A_1 uniquely solvable (sylvester)
finite variance     A_-1, A, A_1 and A_2 sylvester
infinite mean/var   alpha < 0 and A_1 stable
==================  =========================================

The alpha = 0 forms are the analytic limits of the alpha != 0 forms; the
branch is selected automatically when |alpha| * max(1, T) < 1e-9 because the
general expressions divide by alpha.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConditionError, NumericalError
from .linalg import (
    classify_spectrum,
    mat_exp,
    solve_lyapunov,
    solve_lyapunov_transposed,
    symmetrize,
    van_loan_integral,
)
from .systems import CostSpec, LtiSystem

__all__ = [
    "ConditionCheck",
    "CostStats",
    "expected_cost_finite",
    "expected_cost_infinite",
    "variance_cost_finite",
    "variance_cost_infinite",
    "variance_cost_infinite_unreduced",
    "cost_stats_lyapunov",
]

#: Below this value of |alpha| * max(1, T) the alpha = 0 formulas are used.
ALPHA_BRANCH_TOL = 1e-9

#: Raw variances in [-VARIANCE_CLAMP_RTOL * (1 + mean^2), 0) clamp to zero.
VARIANCE_CLAMP_RTOL = 1e-8


@dataclass(frozen=True)
class ConditionCheck:
    """Outcome of one named validity predicate."""

    name: str
    passed: bool
    detail: str = ""


@dataclass
class CostStats:
    """Analytic cost statistics plus provenance of how they were obtained."""

    mean: float
    variance: float
    method: str                      # "lyapunov" | "expm"
    conditions_checked: list = field(default_factory=list)
    branch: str = ""
    raw_variance: float = None

    @property
    def std(self):
        return math.sqrt(self.variance)


def _shift(a, k, alpha):
    return a + (k * alpha) * np.eye(a.shape[0])


def _use_zero_alpha(alpha, horizon):
    return abs(alpha) * max(1.0, horizon) < ALPHA_BRANCH_TOL


def _check_sylvester(a, multiples, alpha):
    """Classify A + k*alpha*I for each k; return checks and failure list."""
    checks = []
    failed = []
    for k in multiples:
        name = "A sylvester" if k == 0 else f"A{k:+g}a sylvester"
        rep = classify_spectrum(_shift(a, k, alpha))
        detail = "" if rep.is_sylvester else (
            "eigenvalue pair sums to zero: " + ", ".join(
                f"({rep.eigenvalues[i]:.4g}, {rep.eigenvalues[j]:.4g})"
                for i, j in rep.degenerate_pairs[:2]
            )
        )
        checks.append(ConditionCheck(name, rep.is_sylvester, detail))
        if not rep.is_sylvester:
            failed.append(name)
    return checks, failed


def _check_infinite(a, alpha):
    checks = [ConditionCheck("alpha < 0", alpha < 0.0, f"alpha = {alpha:g}")]
    rep = classify_spectrum(_shift(a, 1, alpha))
    checks.append(ConditionCheck(
        "A+1a stable", rep.is_stable,
        f"max Re eig = {rep.eigenvalues.real.max():.4g}",
    ))
    failed = [c.name for c in checks if not c.passed]
    return checks, failed


def _raise_conditions(failed, checks, what):
    raise ConditionError(
        f"{what} is not computable by the Lyapunov method: failed {', '.join(failed)}",
        conditions=checks,
    )


def _finalize_variance(raw, mean):
    if raw >= 0.0:
        return raw
    if raw >= -VARIANCE_CLAMP_RTOL * (1.0 + mean * mean):
        return 0.0
    raise NumericalError(
        f"variance came out {raw:.6e} < 0 beyond the rounding allowance; "
        "the validity conditions are likely violated numerically"
    )


def _transposed_finite(y_inf, e_t):
    """Y_T = Y - e^{A^T T} Y e^{A T} given Y and e^{A T}."""
    return symmetrize(y_inf - e_t.T @ y_inf @ e_t)


# ---------------------------------------------------------------------------
# finite horizon
# ---------------------------------------------------------------------------

def _shared(work, key, compute):
    """Memoize Lyapunov solutions and exponentials within one evaluation."""
    if key not in work:
        work[key] = compute()
    return work[key]


def _finite_mean(sys, cost, checks_out=None, work=None):
    a, v, q = sys.A, sys.V, cost.Q
    alpha, t = cost.alpha, cost.horizon
    work = {} if work is None else work
    zero_branch = _use_zero_alpha(alpha, t)
    multiples = (0,) if zero_branch else (0, 1)
    checks, failed = _check_sylvester(a, multiples, alpha)
    if checks_out is not None:
        checks_out.extend(checks)
    if failed:
        _raise_conditions(failed, checks, "finite-horizon mean")

    xv = _shared(work, "xv", lambda: solve_lyapunov(a, v))
    e0 = _shared(work, "e0", lambda: mat_exp(a, t))
    sig_t = _shared(work, "sig_t",
                    lambda: symmetrize(e0 @ (sys.Sigma0 - xv) @ e0.T + xv))
    if zero_branch:
        y = _shared(work, "y0", lambda: solve_lyapunov_transposed(a, q))
        mean = float(np.trace((sys.Sigma0 - sig_t + t * v) @ y))
        return mean, "finite mean, alpha=0 branch"
    y = _shared(work, "y_p",
                lambda: solve_lyapunov_transposed(_shift(a, 1, alpha), q))
    g = math.exp(2.0 * alpha * t)
    mean = float(np.trace((sys.Sigma0 - g * sig_t + (g - 1.0) / (2.0 * alpha) * v) @ y))
    return mean, "finite mean, general-alpha branch"


def _finite_variance(sys, cost, checks_out=None, work=None):
    a, v, q = sys.A, sys.V, cost.Q
    alpha, t = cost.alpha, cost.horizon
    mu0 = sys.mu0
    work = {} if work is None else work
    zero_branch = _use_zero_alpha(alpha, t)
    multiples = (0,) if zero_branch else (-1, 0, 1, 2)
    checks, failed = _check_sylvester(a, multiples, alpha)
    if checks_out is not None:
        checks_out.extend(checks)
    if failed:
        _raise_conditions(failed, checks, "finite-horizon variance")

    xv = _shared(work, "xv", lambda: solve_lyapunov(a, v))
    delta = symmetrize(sys.Sigma0 - xv)

    if zero_branch:
        e0 = _shared(work, "e0", lambda: mat_exp(a, t))
        y0 = _shared(work, "y0", lambda: solve_lyapunov_transposed(a, q))
        y0_t = _transposed_finite(y0, e0)
        # analytic alpha -> 0 limit of (e^{4aT} Y_-1,T - Y_1,T) / (4a):
        # T * Y - integral_0^T e^{A^T t} Y e^{A t} dt
        y_of_y = solve_lyapunov_transposed(a, y0)
        limit_term = t * y0 - _transposed_finite(y_of_y, e0)
        xd = solve_lyapunov(a, delta)
        cross = van_loan_integral(a, xd @ e0.T @ q, a, t)
        raw = (
            2.0 * np.trace((delta @ y0_t) @ (delta @ y0_t))
            - 2.0 * (mu0 @ y0_t @ mu0) ** 2
            + 4.0 * np.trace(xv @ q @ (xv @ limit_term + 2.0 * xd @ y0_t - 2.0 * cross))
        )
        return float(raw), "finite variance, alpha=0 branch"

    a_p = _shift(a, 1, alpha)
    a_m = _shift(a, -1, alpha)
    e_p = mat_exp(a_p, t)
    y_p = _shared(work, "y_p", lambda: solve_lyapunov_transposed(a_p, q))
    y_p_t = _transposed_finite(y_p, e_p)
    y_m = solve_lyapunov_transposed(a_m, q)
    y_m_t = _transposed_finite(y_m, mat_exp(a_m, t))
    x2d = solve_lyapunov(_shift(a, 2, alpha), delta)
    cross = van_loan_integral(_shift(a, 3, alpha), x2d @ e_p.T @ q, a_p, t)
    g4 = math.exp(4.0 * alpha * t)
    mid = xv @ ((g4 * y_m_t - y_p_t) / (4.0 * alpha)) + 2.0 * x2d @ y_p_t - 2.0 * cross
    raw = (
        2.0 * np.trace((delta @ y_p_t) @ (delta @ y_p_t))
        - 2.0 * (mu0 @ y_p_t @ mu0) ** 2
        + 4.0 * np.trace(xv @ q @ mid)
    )
    return float(raw), "finite variance, general-alpha branch"


def expected_cost_finite(sys: LtiSystem, cost: CostSpec):
    """E of the finite-horizon cost integral (requires a finite ``cost.horizon``)."""
    _require_finite_horizon(cost)
    mean, _ = _finite_mean(sys, cost)
    return mean


def variance_cost_finite(sys: LtiSystem, cost: CostSpec):
    """Var of the finite-horizon cost integral, clamped at zero against rounding."""
    _require_finite_horizon(cost)
    mean, _ = _finite_mean(sys, cost)
    raw, _ = _finite_variance(sys, cost)
    return _finalize_variance(raw, mean)


def _require_finite_horizon(cost):
    if cost.is_infinite:
        raise ValueError("cost.horizon must be finite for the finite-horizon operations")


def _require_infinite_horizon(cost):
    if not cost.is_infinite:
        raise ValueError("cost.horizon must be infinite for the infinite-horizon operations")


# ---------------------------------------------------------------------------
# infinite horizon
# ---------------------------------------------------------------------------

def _infinite_mean(sys, cost, checks_out=None):
    checks, failed = _check_infinite(sys.A, cost.alpha)
    if checks_out is not None:
        checks_out.extend(checks)
    if failed:
        _raise_conditions(failed, checks, "infinite-horizon mean (cost diverges)")
    y = solve_lyapunov_transposed(_shift(sys.A, 1, cost.alpha), cost.Q)
    return float(np.trace((sys.Sigma0 - sys.V / (2.0 * cost.alpha)) @ y))


def expected_cost_infinite(sys: LtiSystem, cost: CostSpec):
    """E of the infinite-horizon cost; requires alpha < 0 and stable shifted drift."""
    _require_infinite_horizon(cost)
    return _infinite_mean(sys, cost)


def _infinite_variance(sys, cost, checks_out=None):
    checks, failed = _check_infinite(sys.A, cost.alpha)
    if checks_out is not None:
        checks_out.extend(checks)
    if failed:
        _raise_conditions(failed, checks, "infinite-horizon variance (cost diverges)")
    alpha = cost.alpha
    y = solve_lyapunov_transposed(_shift(sys.A, 1, alpha), cost.Q)
    a2 = _shift(sys.A, 2, alpha)
    x2_s0 = solve_lyapunov(a2, sys.Sigma0)
    x2_v = solve_lyapunov(a2, sys.V)
    raw = (
        2.0 * np.trace((sys.Sigma0 @ y) @ (sys.Sigma0 @ y))
        - 2.0 * (sys.mu0 @ y @ sys.mu0) ** 2
        + 4.0 * np.trace((x2_s0 - x2_v / (4.0 * alpha)) @ y @ sys.V @ y)
    )
    return float(raw)


def variance_cost_infinite(sys: LtiSystem, cost: CostSpec):
    """Var of the infinite-horizon cost; requires alpha < 0 and stable shifted drift."""
    _require_infinite_horizon(cost)
    mean = _infinite_mean(sys, cost)
    raw = _infinite_variance(sys, cost)
    return _finalize_variance(raw, mean)


def variance_cost_infinite_unreduced(sys: LtiSystem, cost: CostSpec):
    """Diagnostic evaluation of the infinite-horizon variance before algebraic reduction.

    Mathematically identical to :func:`variance_cost_infinite` but uses the
    initial-condition offset ``Sigma0 - X[V; A]`` explicitly, so it
    additionally needs the unshifted noise Lyapunov equation to be solvable.
    Exposed for the equivalence test between the two evaluations.
    """
    _require_infinite_horizon(cost)
    checks, failed = _check_infinite(sys.A, cost.alpha)
    if failed:
        _raise_conditions(failed, checks, "infinite-horizon variance (cost diverges)")
    alpha = cost.alpha
    xv = solve_lyapunov(sys.A, sys.V)
    delta = symmetrize(sys.Sigma0 - xv)
    y = solve_lyapunov_transposed(_shift(sys.A, 1, alpha), cost.Q)
    x2d = solve_lyapunov(_shift(sys.A, 2, alpha), delta)
    raw = (
        2.0 * np.trace((delta @ y) @ (delta @ y))
        - 2.0 * (sys.mu0 @ y @ sys.mu0) ** 2
        + 4.0 * np.trace(y @ xv @ cost.Q @ (2.0 * x2d - xv / (4.0 * alpha)))
    )
    mean = _infinite_mean(sys, cost)
    return _finalize_variance(float(raw), mean)


# ---------------------------------------------------------------------------
# combined
# ---------------------------------------------------------------------------

def cost_stats_lyapunov(sys: LtiSystem, cost: CostSpec):
    """Mean and variance through the Lyapunov route, with condition provenance."""
    checks = []
    if cost.is_infinite:
        mean = _infinite_mean(sys, cost, checks_out=checks)
        raw = _infinite_variance(sys, cost)
        branch = "infinite horizon"
    else:
        work = {}
        mean, branch_m = _finite_mean(sys, cost, checks_out=checks, work=work)
        raw, _ = _finite_variance(sys, cost, checks_out=checks, work=work)
        branch = branch_m.replace("finite mean", "finite horizon")
    seen = set()
    unique_checks = [c for c in checks if not (c.name in seen or seen.add(c.name))]
    return CostStats(
        mean=mean,
        variance=_finalize_variance(raw, mean),
        method="lyapunov",
        conditions_checked=unique_checks,
        branch=branch,
        raw_variance=float(raw),
    )
