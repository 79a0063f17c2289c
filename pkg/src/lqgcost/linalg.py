"""Dense linear-algebra kernels: matrix exponential, Lyapunov solvers,
spectral classification and block-exponential integrals.

Everything downstream (state moments, cost statistics, gain synthesis)
reduces to the handful of operations in this module.  All functions are pure
and operate on plain ``numpy`` arrays of float64.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .exceptions import DimensionError, NumericalError, SingularLyapunovError

__all__ = [
    "SpectrumReport",
    "mat_exp",
    "classify_spectrum",
    "solve_lyapunov",
    "solve_lyapunov_transposed",
    "lyap_finite",
    "van_loan_integral",
    "psd_factor",
    "symmetrize",
    "is_symmetric",
]

#: Default relative tolerance separating genuine spectral degeneracy from rounding.
DEFAULT_SPECTRAL_TOL = 1e-9

#: Default relative residual tolerance for Lyapunov solves.
DEFAULT_RESIDUAL_RTOL = 1e-8


def _as_matrix(a, name="matrix"):
    """Validate and return ``a`` as a finite 2-d float array."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _as_square(a, name="matrix"):
    arr = _as_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def is_symmetric(a, rtol=1e-10, atol=1e-12):
    a = np.asarray(a, dtype=float)
    return a.shape[0] == a.shape[1] and np.allclose(a, a.T, rtol=rtol, atol=atol)


def symmetrize(a):
    """Return the symmetric part (a + a^T) / 2."""
    return 0.5 * (a + a.T)


def mat_exp(a, t=1.0):
    """Matrix exponential e^{A t}.

    Uses scaling-and-squaring with a diagonal Pade approximant (via
    ``scipy.linalg.expm``).  Exact identity for ``t == 0``.
    """
    a = _as_square(a, "A")
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    if t == 0.0:
        return np.eye(a.shape[0])
    return expm(a * t)


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalue classification of a square matrix.

    ``is_sylvester`` is False when some eigenvalue pair (i, j), possibly
    i == j, satisfies |lam_i + lam_j| <= tol * (1 + |lam_i| + |lam_j|) -- the
    condition under which A X + X A^T + Q = 0 has no unique solution.
    ``is_stable`` is True when every eigenvalue has real part < -tol.

    Note the implication "stable => sylvester" is exact mathematics; with a
    finite tolerance a barely-stable matrix with large imaginary eigenvalue
    pairs can still be flagged non-sylvester, which is the desired behaviour
    (the Lyapunov equation is then numerically near-singular).
    """

    eigenvalues: np.ndarray
    is_stable: bool
    is_sylvester: bool
    tolerance_used: float
    degenerate_pairs: list = field(default_factory=list)


def classify_spectrum(a, tol=DEFAULT_SPECTRAL_TOL):
    """Classify the spectrum of ``a`` for stability and Lyapunov solvability."""
    a = _as_square(a, "A")
    try:
        lam = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigenvalue computation failed for {a.shape} matrix: {exc}")
    pairs = []
    n = len(lam)
    for i in range(n):
        for j in range(i, n):
            s = abs(lam[i] + lam[j])
            if s <= tol * (1.0 + abs(lam[i]) + abs(lam[j])):
                pairs.append((i, j))
    stable = bool(np.all(lam.real < -tol))
    return SpectrumReport(
        eigenvalues=lam,
        is_stable=stable,
        is_sylvester=not pairs,
        tolerance_used=tol,
        degenerate_pairs=pairs,
    )


def _require_sylvester(a, tol, context):
    report = classify_spectrum(a, tol)
    if not report.is_sylvester:
        i, j = report.degenerate_pairs[0]
        lam = report.eigenvalues
        raise SingularLyapunovError(
            f"{context}: no unique solution, eigenvalues lambda[{i}] = {lam[i]:.6g} and "
            f"lambda[{j}] = {lam[j]:.6g} sum to (nearly) zero",
            conditions=[(context, False)],
        )
    return report


def solve_lyapunov(a, q, tol=DEFAULT_SPECTRAL_TOL, rtol=DEFAULT_RESIDUAL_RTOL):
    """Solve A X + X A^T + Q = 0 for X.

    Parameters
    ----------
    a, q : array_like, square, same size
        Coefficient and constant matrices.
    tol : float
        Relative spectral tolerance for the unique-solvability check.
    rtol : float
        Relative residual tolerance; the solution must satisfy
        ``||A X + X A^T + Q||_F <= rtol * (||A||_F ||X||_F + ||Q||_F)``.

    Returns
    -------
    X : ndarray
        The unique solution.  Symmetrized exactly when ``q`` is symmetric
        (the solution of a symmetric equation is symmetric; downstream
        formulas rely on that holding to the last bit).

    Raises
    ------
    SingularLyapunovError
        If some eigenvalue pair of ``a`` sums to zero (no unique solution).

    Notes
    -----
    Solves the Kronecker-vectorized n^2 x n^2 linear system
    (I (x) A + A (x) I) vec(X) = -vec(Q) by dense LU.  O(n^6), trivially
    auditable, and entirely adequate at the matrix sizes this library
    targets (n of order tens).
    """
    a = _as_square(a, "A")
    q = _as_square(q, "Q")
    if a.shape != q.shape:
        raise DimensionError(f"A and Q must have equal shapes, got {a.shape} and {q.shape}")
    _require_sylvester(a, tol, "lyapunov solve")
    n = a.shape[0]
    eye = np.eye(n)
    coeff = np.kron(eye, a) + np.kron(a, eye)
    try:
        x = np.linalg.solve(coeff, -q.reshape(-1)).reshape(n, n)
    except np.linalg.LinAlgError as exc:
        raise SingularLyapunovError(f"lyapunov solve: LU factorization failed ({exc})")
    if is_symmetric(q):
        x = symmetrize(x)
    residual = np.linalg.norm(a @ x + x @ a.T + q)
    scale = np.linalg.norm(a) * np.linalg.norm(x) + np.linalg.norm(q)
    if residual > rtol * max(scale, 1e-300):
        raise NumericalError(
            f"lyapunov solution residual {residual:.3e} exceeds {rtol:.1e} * {scale:.3e}; "
            "the equation is too ill-conditioned for the dense solver"
        )
    return x


def solve_lyapunov_transposed(a, q, tol=DEFAULT_SPECTRAL_TOL, rtol=DEFAULT_RESIDUAL_RTOL):
    """Solve A^T X + X A + Q = 0 for X (the transposed companion equation)."""
    a = _as_square(a, "A")
    return solve_lyapunov(a.T, q, tol=tol, rtol=rtol)


def lyap_finite(a, q, t1, t2, solution=None, tol=DEFAULT_SPECTRAL_TOL):
    """Integral of e^{A t} Q e^{A^T t} over [t1, t2] via the Lyapunov closed form.

    Equals ``e^{A t1} X e^{A^T t1} - e^{A t2} X e^{A^T t2}`` where X solves
    A X + X A^T + Q = 0.  Requires that equation to be uniquely solvable;
    callers facing a degenerate spectrum should integrate through
    :func:`van_loan_integral` instead.

    ``solution`` may pass a precomputed X to avoid re-solving.
    """
    a = _as_square(a, "A")
    q = _as_square(q, "Q")
    if not (np.isfinite(t1) and np.isfinite(t2)):
        raise ValueError("t1 and t2 must be finite")
    if t1 > t2:
        raise ValueError(f"need t1 <= t2, got t1={t1}, t2={t2}")
    if t1 == t2:
        return np.zeros_like(a)
    x = solve_lyapunov(a, q, tol=tol) if solution is None else solution
    e1 = mat_exp(a, t1)
    e2 = mat_exp(a, t2)
    out = e1 @ x @ e1.T - e2 @ x @ e2.T
    if is_symmetric(q):
        out = symmetrize(out)
    return out


def van_loan_integral(a1, q, a2, horizon):
    """Integral of e^{A1 (T-t)} Q e^{A2 t} over [0, T], quadrature-free.

    Computed exactly as the upper-right block of
    ``expm([[A1, Q], [0, A2]] * T)``; no spectral conditions on A1 or A2.
    """
    a1 = _as_square(a1, "A1")
    a2 = _as_square(a2, "A2")
    q = _as_matrix(q, "Q")
    n1, n2 = a1.shape[0], a2.shape[0]
    if q.shape != (n1, n2):
        raise DimensionError(f"Q must be {n1}x{n2} to conform with A1, A2; got {q.shape}")
    if not np.isfinite(horizon) or horizon < 0:
        raise ValueError(f"horizon must be finite and >= 0, got {horizon}")
    if horizon == 0.0:
        return np.zeros((n1, n2))
    block = np.zeros((n1 + n2, n1 + n2))
    block[:n1, :n1] = a1
    block[:n1, n1:] = q
    block[n1:, n1:] = a2
    return expm(block * horizon)[:n1, n1:]


def psd_factor(m, tol=1e-12):
    """Factor L with L L^T = M for symmetric PSD M.

    Uses the symmetric eigendecomposition; eigenvalues below ``-tol * scale``
    raise, tiny negatives are clamped to zero.  Robust for singular M where a
    Cholesky factorization would fail.
    """
    m = _as_square(m, "M")
    m = symmetrize(m)
    w, u = np.linalg.eigh(m)
    scale = max(abs(w[0]), abs(w[-1]), 1.0)
    if w[0] < -tol * scale:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    return u * np.sqrt(np.clip(w, 0.0, None))
