import numpy as np
import pytest

from pvtsoft.errors import SingularMatrixError
from pvtsoft.numerics import finite_diff_gradient, least_squares, ridge_least_squares, solve_linear


class TestSolveLinear:
    def test_identity(self):
        x = solve_linear(np.eye(3), np.array([1.0, 2.0, 3.0]))
        np.testing.assert_allclose(x, [1.0, 2.0, 3.0])

    def test_diagonal_hand_elimination(self):
        # [[2,0],[0,4]] x = (2,8)  ->  x = (1, 2)
        x = solve_linear(np.array([[2.0, 0.0], [0.0, 4.0]]), np.array([2.0, 8.0]))
        np.testing.assert_allclose(x, [1.0, 2.0])

    def test_rank_deficient_raises(self):
        with pytest.raises(SingularMatrixError):
            solve_linear(np.array([[1.0, 1.0], [1.0, 1.0]]), np.array([1.0, 2.0]))

    def test_residual_bound_on_random_well_conditioned_systems(self):
        """||Ax - b||_inf <= 1e-8 (1 + ||b||_inf) over 100 random systems, n <= 50."""
        rng = np.random.default_rng(42)
        for _ in range(100):
            n = int(rng.integers(1, 51))
            # diagonally dominant, hence well conditioned
            a = rng.normal(size=(n, n)) + n * np.eye(n)
            b = rng.normal(size=n)
            x = solve_linear(a, b)
            resid = np.max(np.abs(a @ x - b))
            assert resid <= 1e-8 * (1.0 + np.max(np.abs(b)))

    def test_matrix_rhs(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(6, 6)) + 6 * np.eye(6)
        b = rng.normal(size=(6, 3))
        x = solve_linear(a, b)
        np.testing.assert_allclose(a @ x, b, atol=1e-10)

    def test_requires_square(self):
        with pytest.raises(ValueError):
            solve_linear(np.ones((2, 3)), np.ones(2))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            solve_linear(np.array([[np.nan, 0.0], [0.0, 1.0]]), np.ones(2))


class TestLeastSquares:
    def test_identity_design(self):
        b = np.array([3.0, -1.0, 2.0])
        np.testing.assert_allclose(least_squares(np.eye(3), b), b)

    def test_exact_line_recovery(self):
        # y = 2x + 1 through 5 points: coefficients recovered to 1e-9
        x = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
        a = np.column_stack([x, np.ones_like(x)])
        coeffs = least_squares(a, 2.0 * x + 1.0)
        np.testing.assert_allclose(coeffs, [2.0, 1.0], atol=1e-9)

    def test_duplicated_columns_raise(self):
        col = np.array([1.0, 2.0, 3.0, 4.0])
        with pytest.raises(SingularMatrixError):
            least_squares(np.column_stack([col, col]), col)

    def test_underdetermined_rejected(self):
        with pytest.raises(ValueError):
            least_squares(np.ones((2, 3)), np.ones(2))

    def test_minimizes_l2_against_perturbations(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(20, 4))
        b = rng.normal(size=20)
        x = least_squares(a, b)
        base = np.sum((a @ x - b) ** 2)
        for _ in range(20):
            x_alt = x + rng.normal(scale=1e-3, size=4)
            assert np.sum((a @ x_alt - b) ** 2) >= base - 1e-12

    def test_ridge_fallback_handles_duplicates(self):
        col = np.array([1.0, 2.0, 3.0, 4.0])
        a = np.column_stack([col, col])
        x = ridge_least_squares(a, 2 * col, ridge=1e-8)
        np.testing.assert_allclose(a @ x, 2 * col, atol=1e-6)


class TestFiniteDiffGradient:
    def test_quadratic(self):
        g = finite_diff_gradient(lambda v: v[0] ** 2, np.array([1.0]), h=1e-5)
        np.testing.assert_allclose(g, [2.0], atol=1e-8)

    def test_constant(self):
        g = finite_diff_gradient(lambda v: 5.0, np.array([0.3, -0.7]), h=1e-5)
        np.testing.assert_allclose(g, [0.0, 0.0])

    def test_product(self):
        # f(x, y) = x y at (2, 3) -> gradient (3, 2)
        g = finite_diff_gradient(lambda v: v[0] * v[1], np.array([2.0, 3.0]), h=1e-6)
        np.testing.assert_allclose(g, [3.0, 2.0], atol=1e-7)

    def test_positive_step_required(self):
        with pytest.raises(ValueError):
            finite_diff_gradient(lambda v: 0.0, np.zeros(1), h=0.0)
