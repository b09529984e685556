"""Soft-computing regression toolkit for PV/T collector electrical efficiency.

Four model families (LSSVM, ANFIS, MLP, RBF network), their trainers
(genetic algorithm, particle swarm, Levenberg-Marquardt, backpropagation),
and the evaluation pipeline: min-max normalization, error metrics,
leverage-based outlier detection, relevancy-factor sensitivity, and plot
data export. See the `cli` module or the `pvtsoft` console script for the
end-to-end workflow.
"""

__version__ = "0.1.0"

from . import anfis, ann, dataset, evaluation, lssvm, numerics  # noqa: F401
from .dataset import (  # noqa: F401
    COLUMNS,
    Dataset,
    RawRecord,
    Scaler,
    SplitResult,
    denormalize,
    fit_normalize,
    generate_synthetic,
    load_csv,
    save_csv,
    split,
)
from .evaluation import (  # noqa: F401
    LeverageReport,
    MetricsReport,
    RelevancyReport,
    andrews_curve,
    hat_diagonal,
    leverage_analysis,
    metrics,
    plot_data,
    relevancy_factor,
    standardized_residuals,
    warning_leverage,
    williams_classify,
)
