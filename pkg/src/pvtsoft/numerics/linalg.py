"""Dense linear solvers used by model training and diagnostics.

Systems here are small (at most a few hundred unknowns), so a direct
partial-pivoting elimination is exact enough and keeps the failure mode
explicit: a pivot below tolerance raises SingularMatrixError instead of
silently returning garbage.
"""

import numpy as np

from ..errors import SingularMatrixError

PIVOT_TOL = 1e-12


def solve_linear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b by Gaussian elimination with partial pivoting.

    `a` must be square; `b` may be a vector or a matrix of stacked
    right-hand sides. The solution satisfies the residual bound
    ||a x - b||_inf <= 1e-8 (1 + ||b||_inf) on well-conditioned systems.

    Raises SingularMatrixError when a pivot falls below
    PIVOT_TOL * max(1, max|a|).
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    single_rhs = b.ndim == 1
    if single_rhs:
        b = b.reshape(-1, 1)
    if b.shape[0] != n:
        raise ValueError(f"dimension mismatch: matrix is {n}x{n}, rhs has {b.shape[0]} rows")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("non-finite entries in linear system")

    tol = PIVOT_TOL * max(1.0, float(np.max(np.abs(a))) if n else 1.0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= tol:
            raise SingularMatrixError(f"matrix is singular within pivot tolerance (column {k})")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        factors = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= factors[:, None] * a[k, k:]
        b[k + 1:] -= factors[:, None] * b[k]

    x = np.empty_like(b)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x[:, 0] if single_rhs else x


def least_squares(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimize ||a x - b||_2 via the normal equations (a'a) x = a'b.

    Requires rows >= cols. Raises SingularMatrixError when a'a is
    rank-deficient (e.g. duplicated columns).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2:
        raise ValueError("design matrix must be 2-D")
    n, k = a.shape
    if n < k:
        raise ValueError(f"underdetermined system: {n} rows < {k} columns")
    return solve_linear(a.T @ a, a.T @ b)


def ridge_least_squares(a: np.ndarray, b: np.ndarray, ridge: float) -> np.ndarray:
    """Least squares with a ridge term: solves (a'a + ridge I) x = a'b.

    Fallback for rank-deficient fits; callers record when they use it.
    """
    a = np.asarray(a, dtype=float)
    gram = a.T @ a
    gram[np.diag_indices_from(gram)] += ridge
    return solve_linear(gram, a.T @ np.asarray(b, dtype=float))


def finite_diff_gradient(f, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient (f(x + h e_i) - f(x - h e_i)) / 2h.

    The independent oracle against which analytic gradients are checked.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        g[i] = (f(x + step) - f(x - step)) / (2.0 * h)
    return g
