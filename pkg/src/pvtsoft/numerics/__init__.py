"""Shared numerical machinery: dense solvers, seeded streams, optimizers."""

from .linalg import (
    finite_diff_gradient,
    least_squares,
    ridge_least_squares,
    solve_linear,
)
from .optimize import (
    GaConfig,
    LmConfig,
    LmResult,
    OptResult,
    PsoConfig,
    ga_minimize,
    lm_fit,
    minimize,
    pso_minimize,
    write_history_csv,
)
from .rng import ALGORITHM_ID, derive_seed, farthest_point_indices, stream

__all__ = [
    "ALGORITHM_ID",
    "GaConfig",
    "LmConfig",
    "LmResult",
    "OptResult",
    "PsoConfig",
    "derive_seed",
    "farthest_point_indices",
    "finite_diff_gradient",
    "ga_minimize",
    "least_squares",
    "lm_fit",
    "minimize",
    "pso_minimize",
    "ridge_least_squares",
    "solve_linear",
    "stream",
    "write_history_csv",
]
