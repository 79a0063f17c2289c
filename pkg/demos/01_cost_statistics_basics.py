"""Closed-form mean and variance of a discounted quadratic cost.

Walks through the scalar reference system

    dx/dt = -x + v,   intensity V = 2,   E[x0] = 0,   E[x0^2] = 1,

whose discounted cost J = integral e^{-t} x(t)^2 dt has mean exactly 1 and
variance exactly 2/3, then does the same for a randomly generated
three-state system where no hand calculation is possible.
"""

import numpy as np

from lqgcost import (
    CostSpec,
    LtiSystem,
    cost_stats_lyapunov,
    expected_cost_finite,
    expected_cost_infinite,
    variance_cost_finite,
    variance_cost_infinite,
)

# --- the scalar system you can check with pen and paper --------------------

sys1 = LtiSystem(A=[[-1.0]], V=[[2.0]], mu0=[0.0], Sigma0=[[1.0]])
cost1 = CostSpec(Q=[[1.0]], alpha=-0.5)          # horizon defaults to infinity

print("scalar reference system")
print(f"  E[J]   = {expected_cost_infinite(sys1, cost1):.12f}   (exact: 1)")
print(f"  Var[J] = {variance_cost_infinite(sys1, cost1):.12f}   (exact: 2/3)")

# The initial second moment E[x0^2] = 1 equals the stationary value here, so
# the finite-horizon mean is simply integral_0^T e^{-t} dt = 1 - e^{-T}:
cost1_T = CostSpec(Q=[[1.0]], alpha=-0.5, horizon=3.0)
print(f"  E[J_3] = {expected_cost_finite(sys1, cost1_T):.12f}   "
      f"(exact: 1 - e^-3 = {1 - np.exp(-3.0):.12f})")
print(f"  Var[J_3] = {variance_cost_finite(sys1, cost1_T):.12f}")

# --- a three-state system --------------------------------------------------

rng = np.random.default_rng(7)
a = rng.normal(size=(3, 3))
a -= (np.linalg.eigvals(a).real.max() + 0.6) * np.eye(3)   # make it stable
noise = rng.normal(size=(3, 3))
v = noise @ noise.T
mu0 = rng.normal(size=3)
spread = rng.normal(size=(3, 3))
sigma0 = spread @ spread.T + np.outer(mu0, mu0)            # second moment!

sys3 = LtiSystem(A=a, V=v, mu0=mu0, Sigma0=sigma0)
cost3 = CostSpec(Q=np.eye(3), alpha=-0.4)

stats = cost_stats_lyapunov(sys3, cost3)
print("\nrandom three-state system")
print(f"  E[J]   = {stats.mean:.6f}")
print(f"  Var[J] = {stats.variance:.6f}")
print(f"  sd[J]  = {stats.std:.6f}")
print("  validity conditions:")
for check in stats.conditions_checked:
    print(f"    {check.name:<16s} {'PASS' if check.passed else 'FAIL'}")
