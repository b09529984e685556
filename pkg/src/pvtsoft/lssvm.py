"""Least-squares support vector regression with a Gaussian kernel.

Training is closed form: with kernel matrix K_ij = k(x_i, x_j) the dual
unknowns (b, a) solve

    [ 0   1'        ] [b]   [0]
    [ 1   K + I/gamma] [a] = [y]

so sum(a) = 0 by the first row and the training residuals are recoverable
as e_k = a_k / gamma. Prediction is f(x) = sum_k a_k k(x, x_k) + b.
Hyperparameters (gamma, sigma2) are searched in log10 space by a
metaheuristic minimizing validation MSE.
"""

from dataclasses import dataclass, replace

import numpy as np

from .dataset import Scaler
from .errors import TrainingError, ValidationError
from .numerics import OptResult, minimize, solve_linear, stream

# Search box for (log10 gamma, log10 sigma2) tuning.
GAMMA_BOUNDS = (1e-2, 1e7)
SIGMA2_BOUNDS = (1e-3, 1e3)
INNER_VALIDATION_FRACTION = 0.8
_INNER_SPLIT_STREAM = 101  # stream id reserved for the inner validation cut

# Reference tuned values for the original 98-point collector campaign,
# used as the no-tuning defaults.
DEFAULT_GAMMA = 6942.0845
DEFAULT_SIGMA2 = 8.01234


@dataclass(frozen=True)
class LssvmHyper:
    """Regularization gamma and kernel width sigma2, both > 0."""

    gamma: float
    sigma2: float

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValidationError(f"gamma must be positive and finite, got {self.gamma}")
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValidationError(f"sigma2 must be positive and finite, got {self.sigma2}")


@dataclass
class LssvmModel:
    """Support values a, bias b, and the stored training inputs.

    The optional scaler ties a pipeline-trained model back to raw units.
    """

    support_values: np.ndarray
    bias: float
    hyper: LssvmHyper
    train_inputs: np.ndarray
    scaler: Scaler | None = None

    def residuals(self) -> np.ndarray:
        """Training residuals e_k = a_k / gamma."""
        return self.support_values / self.hyper.gamma


def rbf_kernel(x: np.ndarray, x_k: np.ndarray, sigma2: float) -> float:
    """Gaussian kernel exp(-||x_k - x||^2 / sigma2); 1 at zero distance."""
    x = np.asarray(x, dtype=float)
    x_k = np.asarray(x_k, dtype=float)
    if x.shape != x_k.shape:
        raise ValidationError(f"kernel arguments must match, got {x.shape} vs {x_k.shape}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(x_k))):
        raise ValidationError("kernel arguments must be finite")
    if sigma2 <= 0:
        raise ValidationError("sigma2 must be positive")
    return float(np.exp(-np.sum((x_k - x) ** 2) / sigma2))


def _kernel_matrix(a: np.ndarray, b: np.ndarray, sigma2: float) -> np.ndarray:
    """Pairwise kernel values between row sets, computed via the expanded
    squared distance to stay O(n m d)."""
    sq = np.sum(a ** 2, axis=1)[:, None] + np.sum(b ** 2, axis=1)[None, :] - 2.0 * (a @ b.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-sq / sigma2)


def train(x: np.ndarray, y: np.ndarray, hyper: LssvmHyper, scaler: Scaler | None = None) -> LssvmModel:
    """Solve the dual system for (bias, support values).

    `x` is the (n, d) normalized input block and `y` the targets. Raises
    TrainingError with a condition estimate when the system is singular.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValidationError("training inputs must be a non-empty (n, d) array")
    if y.shape != (x.shape[0],):
        raise ValidationError("targets must be one value per training row")
    n = x.shape[0]

    kernel = _kernel_matrix(x, x, hyper.sigma2)
    system = np.empty((n + 1, n + 1))
    system[0, 0] = 0.0
    system[0, 1:] = 1.0
    system[1:, 0] = 1.0
    system[1:, 1:] = kernel + np.eye(n) / hyper.gamma
    rhs = np.concatenate([[0.0], y])
    try:
        solution = solve_linear(system, rhs)
    except Exception as exc:
        cond = float(np.linalg.cond(system))
        raise TrainingError(f"dual system is singular (condition estimate {cond:.3e})") from exc
    return LssvmModel(solution[1:], float(solution[0]), hyper, x.copy(), scaler)


def predict(model: LssvmModel, x: np.ndarray):
    """f(x) = sum_k a_k k(x, x_k) + b for one vector or an (m, d) batch."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != model.train_inputs.shape[1]:
        raise ValidationError(
            f"input dimension {x.shape[1]} does not match training dimension {model.train_inputs.shape[1]}"
        )
    k = _kernel_matrix(x, model.train_inputs, model.hyper.sigma2)
    out = k @ model.support_values + model.bias
    return float(out[0]) if single else out


@dataclass
class TuneResult:
    hyper: LssvmHyper
    model: LssvmModel
    history: np.ndarray


def tune(
    x: np.ndarray,
    y: np.ndarray,
    optimizer_cfg,
    gamma_bounds: tuple[float, float] = GAMMA_BOUNDS,
    sigma2_bounds: tuple[float, float] = SIGMA2_BOUNDS,
    validation: tuple[np.ndarray, np.ndarray] | None = None,
    scaler: Scaler | None = None,
) -> TuneResult:
    """Search (gamma, sigma2) in log10 space minimizing validation MSE.

    With no explicit validation set the cost uses a seeded inner 80/20 cut
    of the training rows (the held-out data never touches the search); the
    returned model is retrained on all of `x` with the winning values.
    `optimizer_cfg` may be a GaConfig or PsoConfig; its bounds are replaced
    by the log-space box.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for lo, hi in (gamma_bounds, sigma2_bounds):
        if not 0 < lo < hi:
            raise ValidationError("hyperparameter bounds must be positive with low < high")

    if validation is not None:
        x_fit, y_fit = x, y
        x_val, y_val = (np.asarray(v, dtype=float) for v in validation)
    else:
        n = x.shape[0]
        if n < 2:
            raise ValidationError("need at least 2 training rows for an inner validation split")
        perm = stream(optimizer_cfg.seed, _INNER_SPLIT_STREAM).permutation(n)
        cut = max(1, min(n - 1, int(np.floor(n * INNER_VALIDATION_FRACTION + 0.5))))
        x_fit, y_fit = x[perm[:cut]], y[perm[:cut]]
        x_val, y_val = x[perm[cut:]], y[perm[cut:]]

    log_bounds = [tuple(np.log10(gamma_bounds)), tuple(np.log10(sigma2_bounds))]

    def cost(genes):
        hyper = LssvmHyper(10.0 ** genes[0], 10.0 ** genes[1])
        try:
            m = train(x_fit, y_fit, hyper)
        except TrainingError:
            return np.inf
        err = predict(m, x_val) - y_val
        return float(np.mean(err ** 2))

    cfg = replace(optimizer_cfg, bounds=log_bounds)
    result: OptResult = minimize(cost, cfg)
    best = LssvmHyper(10.0 ** result.point[0], 10.0 ** result.point[1])
    return TuneResult(best, train(x, y, best, scaler), result.history)


def to_dict(model: LssvmModel) -> dict:
    data = {
        "gamma": model.hyper.gamma,
        "sigma2": model.hyper.sigma2,
        "bias": model.bias,
        "support_values": [float(v) for v in model.support_values],
        "train_inputs": [[float(v) for v in row] for row in model.train_inputs],
    }
    if model.scaler is not None:
        data["scaler"] = model.scaler.to_dict()
    return data


def from_dict(data: dict) -> LssvmModel:
    scaler = Scaler.from_dict(data["scaler"]) if "scaler" in data else None
    return LssvmModel(
        np.asarray(data["support_values"], dtype=float),
        float(data["bias"]),
        LssvmHyper(float(data["gamma"]), float(data["sigma2"])),
        np.asarray(data["train_inputs"], dtype=float),
        scaler,
    )
