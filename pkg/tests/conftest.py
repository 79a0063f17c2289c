"""Shared samplers and independent oracles for the test suite.

The oracles here deliberately avoid the closed-form code paths they are used
to check: Lyapunov solutions are cross-checked by adaptive quadrature of the
defining integral, and cost variances by two-dimensional trapezoidal
quadrature of the quartic-moment integrand built from the (separately
tested) state moments and Gaussian quartic expectation formulas.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad, quad_vec
from scipy.linalg import expm

from lqgcost import (
    CostSpec,
    JointGaussian,
    LtiSystem,
    joint_quartic_expectation,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20230417)


# ---------------------------------------------------------------------------
# random-instance samplers
# ---------------------------------------------------------------------------

def random_stable(n, rng, margin=0.3, spread=1.0):
    """Random stable drift with all eigenvalue real parts < -margin.

    A random slack keeps the leading eigenvalue off the exact margin (a
    matrix with a real eigenvalue pinned at -margin turns singular under a
    drift shift of +margin).
    """
    a = rng.normal(scale=spread, size=(n, n))
    shift = np.linalg.eigvals(a).real.max() + margin + rng.uniform(0.02, 0.5) * max(spread, 0.3)
    return a - shift * np.eye(n)


def min_pair_sum(a):
    """min over eigenvalue pairs (i, j), i <= j, of |lam_i + lam_j|."""
    lam = np.linalg.eigvals(a)
    s = np.abs(lam[:, None] + lam[None, :])
    return s[np.triu_indices_from(s)].min()


def random_stable_sylvester(n, rng, alpha_shifts=(), margin=0.3, separation=0.05,
                            spread=1.0, max_tries=5000):
    """Random stable drift keeping A + s*I comfortably sylvester for each shift.

    Rejection sampling: a shifted conjugate pair near real part -s sums to
    nearly zero, so draws whose shifted pair sums come within ``separation``
    of zero are discarded.
    """
    for _ in range(max_tries):
        a = random_stable(n, rng, margin=margin, spread=spread)
        eye = np.eye(n)
        if all(min_pair_sum(a + s * eye) > separation for s in (0.0, *alpha_shifts)):
            return a
    raise RuntimeError("could not sample a suitable drift")


def random_spd(n, rng, scale=1.0):
    m = rng.normal(size=(n, n))
    return scale * (m @ m.T) + 1e-3 * np.eye(n)


def random_system(n, rng, alpha_shifts=(), margin=0.3, spread=1.0, zero_mean=False):
    """Random LtiSystem with a well-conditioned stable drift."""
    a = random_stable_sylvester(n, rng, alpha_shifts=alpha_shifts, margin=margin,
                                spread=spread)
    v = random_spd(n, rng)
    mu0 = np.zeros(n) if zero_mean else rng.normal(size=n)
    sigma0 = random_spd(n, rng) + np.outer(mu0, mu0)
    return LtiSystem(A=a, V=v, mu0=mu0, Sigma0=sigma0)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def lyapunov_by_quadrature(a, q, rtol=1e-10):
    """integral_0^inf e^{A t} Q e^{A^T t} dt by adaptive quadrature (stable A only)."""
    decay = -np.linalg.eigvals(a).real.max()
    assert decay > 0, "quadrature oracle needs a stable A"
    t_stop = 60.0 / decay
    val, _ = quad_vec(lambda t: expm(a * t) @ q @ expm(a * t).T, 0.0, t_stop,
                      epsrel=rtol, epsabs=1e-13)
    return val


def finite_integral_by_quadrature(a, q, t1, t2, rtol=1e-10):
    """integral_{t1}^{t2} e^{A t} Q e^{A^T t} dt by adaptive quadrature."""
    val, _ = quad_vec(lambda t: expm(a * t) @ q @ expm(a * t).T, t1, t2,
                      epsrel=rtol, epsabs=1e-13)
    return val


def _moments_on_grid(sys, ts):
    """Exact mu(t), Sigma(t) on a grid, from first principles (no Lyapunov solve).

    Sigma(t) = e^{A t} Sigma0 e^{A^T t} + G(t) with G accumulated step by
    step through the same van-Loan-style block exponential identity the
    library uses, but recomputed locally to stay independent of the module
    under test.
    """
    n = sys.dim
    dt = ts[1] - ts[0]
    big = np.zeros((2 * n, 2 * n))
    big[:n, :n] = -sys.A
    big[:n, n:] = sys.V
    big[n:, n:] = sys.A.T
    eb = expm(big * dt)
    phi = expm(sys.A * dt)
    g_step = phi @ eb[:n, n:]          # integral over one step of e^{A s} V e^{A^T s}
    mus, sigmas, trans = [], [], []
    e_t = np.eye(n)
    g_t = np.zeros((n, n))
    for _ in ts:
        mus.append(e_t @ sys.mu0)
        sigmas.append(e_t @ sys.Sigma0 @ e_t.T + g_t)
        trans.append(e_t)
        g_t = phi @ g_t @ phi.T + g_step
        e_t = phi @ e_t
    return mus, sigmas, trans


def mean_by_quadrature(sys, cost, rtol=1e-10):
    """Mean of the finite-horizon cost by adaptive quadrature of the
    weighted second-moment trace (independent of the closed-form cost path)."""
    from lqgcost import second_moment

    def integrand(t):
        return math.exp(2.0 * cost.alpha * t) * np.trace(second_moment(sys, t) @ cost.Q)

    val, _ = quad(integrand, 0.0, cost.horizon, epsrel=rtol, epsabs=1e-13, limit=200)
    return val


def cost_moments_by_quadrature(sys, cost, n_grid=320):
    """(mean, variance) of the finite-horizon cost by 2-d trapezoid quadrature.

    Builds E[x(t1)^T Q x(t1) x(t2)^T Q x(t2)] pointwise from the Gaussian
    quartic expectation and the exact state moments, then integrates.
    """
    t_end = cost.horizon
    q = cost.Q
    ts = np.linspace(0.0, t_end, n_grid + 1)
    w = np.full(n_grid + 1, t_end / n_grid)
    w[0] *= 0.5
    w[-1] *= 0.5
    mus, sigmas, trans = _moments_on_grid(sys, ts)
    dampings = np.exp(2.0 * cost.alpha * ts)

    mean = sum(wi * di * np.trace(si @ q)
               for wi, di, si in zip(w, dampings, sigmas))

    # x(t2) = Phi(t2-t1) x(t1) + independent noise for t1 <= t2, hence
    # Sigma(t1, t2) = Sigma(t1) Phi(t2-t1)^T with Phi(t2-t1) = trans[j-i]
    total = 0.0
    for i in range(n_grid + 1):
        mu1, s1 = mus[i], sigmas[i]
        k11 = s1 - np.outer(mu1, mu1)
        for j in range(i, n_grid + 1):
            mu2, s2 = mus[j], sigmas[j]
            cross = s1 @ trans[j - i].T
            jg = JointGaussian(
                mu_x=mu1, mu_y=mu2,
                K_xx=k11,
                K_xy=cross - np.outer(mu1, mu2),
                K_yy=s2 - np.outer(mu2, mu2),
            )
            term = w[i] * w[j] * dampings[i] * dampings[j] * \
                joint_quartic_expectation(jg, q, q)
            total += term if i == j else 2.0 * term
    return mean, total - mean ** 2


def scalar_system(a=-1.0, v=2.0, mu0=0.0, sigma0=1.0):
    return LtiSystem(A=[[a]], V=[[v]], mu0=[mu0], Sigma0=[[sigma0]])


def scalar_cost(q=1.0, alpha=-0.5, horizon=np.inf):
    return CostSpec(Q=[[q]], alpha=alpha, horizon=horizon)
