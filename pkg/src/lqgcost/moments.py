"""First and second moments of the state of a noisy linear system.

For dx/dt = A x + v with noise intensity V and Gaussian initial state,
the state stays Gaussian with

    mu(t)          = e^{A t} mu0,
    Sigma(t)       = e^{A t} (Sigma0 - X) e^{A^T t} + X,
    Sigma(t1, t2)  = e^{A t1} (Sigma0 - X) e^{A^T t2} + X e^{A^T (t2 - t1)},

where X solves A X + X A^T + V = 0 and Sigma(t1, t2) = E[x(t1) x(t2)^T]
for t1 <= t2.  When that Lyapunov equation is singular (A has eigenvalue
pairs summing to zero), Sigma(t) falls back to the equivalent integral form

    Sigma(t) = e^{A t} Sigma0 e^{A^T t} + integral_0^t e^{A s} V e^{A^T s} ds

evaluated through one block matrix exponential, so no spectral condition is
needed for the single-time second moment.
"""

import numpy as np

from .exceptions import SingularLyapunovError
from .linalg import mat_exp, solve_lyapunov, symmetrize, van_loan_integral
from .systems import LtiSystem

__all__ = ["mean_state", "second_moment", "cross_moment", "noise_gramian_finite"]


def _check_time(t):
    if not np.isfinite(t) or t < 0:
        raise ValueError(f"time must be finite and >= 0, got {t}")


def mean_state(sys: LtiSystem, t):
    """Mean of the state at time t: e^{A t} mu0."""
    _check_time(t)
    return mat_exp(sys.A, t) @ sys.mu0


def noise_gramian_finite(a, v, t):
    """integral_0^t e^{A s} V e^{A^T s} ds for any square A (no spectral conditions).

    Identity used: the block exponential of [[-A, V], [0, A^T]] * t has
    upper-right block integral_0^t e^{-A (t-s)} V e^{A^T s} ds; multiplying by
    e^{A t} from the left shifts the decaying factor onto the integrand.
    """
    _check_time(t)
    if t == 0.0:
        return np.zeros_like(np.asarray(a, dtype=float))
    inner = van_loan_integral(-np.asarray(a, float), v, np.asarray(a, float).T, t)
    return symmetrize(mat_exp(a, t) @ inner)


def second_moment(sys: LtiSystem, t):
    """Second moment Sigma(t) = E[x(t) x(t)^T], exactly symmetric."""
    _check_time(t)
    if t == 0.0:
        return sys.Sigma0.copy()
    e = mat_exp(sys.A, t)
    try:
        x = solve_lyapunov(sys.A, sys.V)
    except SingularLyapunovError:
        return symmetrize(e @ sys.Sigma0 @ e.T + noise_gramian_finite(sys.A, sys.V, t))
    return symmetrize(e @ (sys.Sigma0 - x) @ e.T + x)


def cross_moment(sys: LtiSystem, t1, t2):
    """Cross moment Sigma(t1, t2) = E[x(t1) x(t2)^T].

    Requires the noise Lyapunov equation to be uniquely solvable; unlike
    :func:`second_moment` there is no integral fallback here.
    """
    _check_time(t1)
    _check_time(t2)
    if t1 > t2:
        return cross_moment(sys, t2, t1).T
    x = solve_lyapunov(sys.A, sys.V)
    e1 = mat_exp(sys.A, t1)
    e2 = mat_exp(sys.A, t2)
    out = e1 @ (sys.Sigma0 - x) @ e2.T + x @ mat_exp(sys.A.T, t2 - t1)
    if t1 == t2:
        out = symmetrize(out)
    return out
