"""The two neural regressors: a single-hidden-layer perceptron and a
Gaussian radial-basis-function network.

The MLP is d -> H -> 1 with sigmoid hidden units and a linear output,

    z = sum_i w3_i * sigmoid(W_i . x + b1_i) + b3,

trained either by full-batch backpropagation or by Levenberg-Marquardt on
the per-sample residual vector (analytic Jacobian in both cases).

The RBF network is f(x) = sum_p w_p exp(-||x - c_p||^2 / (2 sigma^2)) with
a single global width. Exact interpolation places one center on every
training point and solves the square kernel system; the reduced form picks
centers by farthest-point traversal and fits weights by least squares.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericsError, SingularMatrixError, TrainingDivergedError, ValidationError
from .numerics import (
    LmConfig,
    farthest_point_indices,
    least_squares,
    lm_fit,
    ridge_least_squares,
    solve_linear,
    stream,
)

DIVERGENCE_LIMIT = 1e12
INIT_WEIGHT_HALF_RANGE = 0.5
RBF_RIDGE = 1e-8
_MLP_INIT_STREAM = 11
_RBF_CENTER_STREAM = 13


def sigmoid(z):
    """Logistic 1 / (1 + e^-z), saturating cleanly for large |z|."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# MLP


@dataclass
class MlpModel:
    hidden_weights: np.ndarray   # (H, d)
    hidden_biases: np.ndarray    # (H,)
    output_weights: np.ndarray   # (H,)
    output_bias: float

    def __post_init__(self):
        self.hidden_weights = np.asarray(self.hidden_weights, dtype=float)
        self.hidden_biases = np.asarray(self.hidden_biases, dtype=float)
        self.output_weights = np.asarray(self.output_weights, dtype=float)
        h, d = self.hidden_weights.shape
        if self.hidden_biases.shape != (h,) or self.output_weights.shape != (h,):
            raise ValidationError("bias/output weight lengths must match the hidden layer size")
        arrays = (self.hidden_weights, self.hidden_biases, self.output_weights)
        if not all(np.all(np.isfinite(a)) for a in arrays) or not np.isfinite(self.output_bias):
            raise ValidationError("model parameters must be finite")

    @property
    def input_dim(self) -> int:
        return self.hidden_weights.shape[1]

    @property
    def hidden_count(self) -> int:
        return self.hidden_weights.shape[0]


@dataclass
class MlpGradient:
    """Gradient of the sum-of-squared-errors cost, shaped like the model."""

    hidden_weights: np.ndarray
    hidden_biases: np.ndarray
    output_weights: np.ndarray
    output_bias: float


def mlp_init(input_dim: int, hidden: int, seed: int) -> MlpModel:
    """Seeded uniform(-0.5, 0.5) initialization of every weight and bias."""
    rng = stream(seed, _MLP_INIT_STREAM)
    r = INIT_WEIGHT_HALF_RANGE
    return MlpModel(
        rng.uniform(-r, r, size=(hidden, input_dim)),
        rng.uniform(-r, r, size=hidden),
        rng.uniform(-r, r, size=hidden),
        float(rng.uniform(-r, r)),
    )


def mlp_forward(model: MlpModel, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.input_dim,):
        raise ValidationError(f"expected input of dimension {model.input_dim}, got shape {x.shape}")
    hidden = sigmoid(model.hidden_weights @ x + model.hidden_biases)
    return float(model.output_weights @ hidden + model.output_bias)


def mlp_predict(model: MlpModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise ValidationError(f"expected an (n, {model.input_dim}) batch, got shape {x.shape}")
    hidden = sigmoid(x @ model.hidden_weights.T + model.hidden_biases)
    return hidden @ model.output_weights + model.output_bias


def _prediction_jacobian(model: MlpModel, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample derivative of the prediction w.r.t. the packed parameters
    [W.ravel, b1, w3, b3]; returns (predictions, (n, p) Jacobian)."""
    hidden = sigmoid(x @ model.hidden_weights.T + model.hidden_biases)     # (n, H)
    pred = hidden @ model.output_weights + model.output_bias
    s = hidden * (1.0 - hidden) * model.output_weights[None, :]            # (n, H)
    n, h = hidden.shape
    d = model.input_dim
    jac = np.empty((n, h * d + h + h + 1))
    jac[:, : h * d] = (s[:, :, None] * x[:, None, :]).reshape(n, h * d)
    jac[:, h * d: h * d + h] = s
    jac[:, h * d + h: h * d + 2 * h] = hidden
    jac[:, -1] = 1.0
    return pred, jac


def _pack(model: MlpModel) -> np.ndarray:
    return np.concatenate(
        [model.hidden_weights.ravel(), model.hidden_biases, model.output_weights, [model.output_bias]]
    )


def _unpack(theta: np.ndarray, hidden: int, input_dim: int) -> MlpModel:
    hd = hidden * input_dim
    return MlpModel(
        theta[:hd].reshape(hidden, input_dim),
        theta[hd: hd + hidden],
        theta[hd + hidden: hd + 2 * hidden],
        float(theta[-1]),
    )


def mlp_gradient(model: MlpModel, x: np.ndarray, y: np.ndarray) -> MlpGradient:
    """Exact gradient of E = sum_p (z_p - y_p)^2 over the batch."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValidationError("batch must be a non-empty (n, d) array")
    pred, jac = _prediction_jacobian(model, x)
    g = 2.0 * (jac.T @ (pred - y))
    h, d = model.hidden_count, model.input_dim
    unpacked = _unpack(g, h, d)
    return MlpGradient(
        unpacked.hidden_weights, unpacked.hidden_biases, unpacked.output_weights, unpacked.output_bias
    )


def mlp_train_bp(
    x: np.ndarray,
    y: np.ndarray,
    learning_rate: float,
    epochs: int,
    seed: int,
    hidden: int = 7,
    validation: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[MlpModel, np.ndarray]:
    """Full-batch gradient descent w <- w - lr * dE/dw.

    The step uses the mean-squared-error gradient (the SSE gradient divided
    by the batch size) so a given learning rate behaves the same at any
    batch size. Aborts with TrainingDivergedError if the cost passes
    DIVERGENCE_LIMIT. Returns the model and per-epoch MSE history.

    With `validation` = (x_val, y_val) the returned weights are those of
    the epoch with the lowest held-out MSE (early-stopping selection); the
    descent itself still minimizes the training cost.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if learning_rate < 0:
        raise ValidationError("learning_rate must be >= 0")
    n = x.shape[0]
    model = mlp_init(x.shape[1], hidden, seed)
    theta = _pack(model)
    history = np.empty(epochs)
    tracker = _ValidationTracker(validation, hidden, x.shape[1])
    tracker.offer(theta)
    for epoch in range(epochs):
        m = _unpack(theta, hidden, x.shape[1])
        pred, jac = _prediction_jacobian(m, x)
        err = pred - y
        cost = float(np.mean(err ** 2))
        history[epoch] = cost
        if not np.isfinite(cost) or cost > DIVERGENCE_LIMIT:
            raise TrainingDivergedError(f"cost {cost:.3e} exceeded the divergence limit at epoch {epoch}")
        theta = theta - learning_rate * (2.0 / n) * (jac.T @ err)
        tracker.offer(theta)
    return _unpack(tracker.best(theta), hidden, x.shape[1]), history


class _ValidationTracker:
    """Keeps the parameter vector with the lowest held-out MSE."""

    def __init__(self, validation, hidden: int, input_dim: int):
        self.validation = validation
        self.hidden = hidden
        self.input_dim = input_dim
        self.best_theta = None
        self.best_mse = np.inf

    def offer(self, theta: np.ndarray) -> None:
        if self.validation is None:
            return
        x_val, y_val = self.validation
        pred = mlp_predict(_unpack(theta, self.hidden, self.input_dim), x_val)
        mse = float(np.mean((pred - y_val) ** 2))
        if mse < self.best_mse:
            self.best_mse = mse
            self.best_theta = theta.copy()

    def best(self, fallback: np.ndarray) -> np.ndarray:
        return fallback if self.best_theta is None else self.best_theta


def mlp_train_lm(
    x: np.ndarray,
    y: np.ndarray,
    cfg: LmConfig,
    seed: int,
    hidden: int = 7,
    validation: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[MlpModel, np.ndarray]:
    """Levenberg-Marquardt on the per-sample residual vector z_p - y_p.

    With `validation` the accepted iterate with the lowest held-out MSE is
    returned instead of the last one (early-stopping selection).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    model = mlp_init(x.shape[1], hidden, seed)

    def residual(theta):
        pred, _ = _prediction_jacobian(_unpack(theta, hidden, x.shape[1]), x)
        return pred - y

    def jacobian(theta):
        _, jac = _prediction_jacobian(_unpack(theta, hidden, x.shape[1]), x)
        return jac

    tracker = _ValidationTracker(validation, hidden, x.shape[1])
    result = lm_fit(residual, jacobian, _pack(model), cfg,
                    monitor=lambda theta, cost: tracker.offer(theta))
    return _unpack(tracker.best(result.params), hidden, x.shape[1]), result.history


def mlp_to_dict(model: MlpModel) -> dict:
    return {
        "hidden_weights": [[float(v) for v in row] for row in model.hidden_weights],
        "hidden_biases": [float(v) for v in model.hidden_biases],
        "output_weights": [float(v) for v in model.output_weights],
        "output_bias": float(model.output_bias),
    }


def mlp_from_dict(data: dict) -> MlpModel:
    return MlpModel(
        np.asarray(data["hidden_weights"], dtype=float),
        np.asarray(data["hidden_biases"], dtype=float),
        np.asarray(data["output_weights"], dtype=float),
        float(data["output_bias"]),
    )


# ---------------------------------------------------------------------------
# RBF network


@dataclass
class RbfModel:
    centers: np.ndarray    # (m, d)
    sigma: float
    weights: np.ndarray    # (m,)
    ridge_fallback: bool = field(default=False, compare=False)

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.centers.ndim != 2 or self.centers.shape[0] < 1:
            raise ValidationError("centers must be a non-empty (m, d) array")
        if self.weights.shape != (self.centers.shape[0],):
            raise ValidationError("one weight per center required")
        if not self.sigma > 0:
            raise ValidationError(f"sigma must be positive, got {self.sigma}")


def rbf_activation(r, sigma: float):
    """Gaussian bump exp(-r^2 / (2 sigma^2)) of the distance r >= 0."""
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValidationError("distance must be non-negative")
    out = np.exp(-(r ** 2) / (2.0 * sigma ** 2))
    return float(out) if out.ndim == 0 else out


def _activation_matrix(x: np.ndarray, centers: np.ndarray, sigma: float) -> np.ndarray:
    sq = (
        np.sum(x ** 2, axis=1)[:, None]
        + np.sum(centers ** 2, axis=1)[None, :]
        - 2.0 * (x @ centers.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-sq / (2.0 * sigma ** 2))


def default_sigma(centers: np.ndarray) -> float:
    """Mean nearest-neighbor distance between centers (1.0 for a single center)."""
    centers = np.asarray(centers, dtype=float)
    m = centers.shape[0]
    if m < 2:
        return 1.0
    d2 = (
        np.sum(centers ** 2, axis=1)[:, None]
        + np.sum(centers ** 2, axis=1)[None, :]
        - 2.0 * (centers @ centers.T)
    )
    np.fill_diagonal(d2, np.inf)
    nn = np.sqrt(np.maximum(np.min(d2, axis=1), 0.0))
    sigma = float(np.mean(nn))
    if sigma <= 0:
        raise NumericsError("duplicate centers give a zero nearest-neighbor distance")
    return sigma


def rbf_train_interpolation(x: np.ndarray, y: np.ndarray, sigma: float) -> RbfModel:
    """Exact interpolation: one center per training point, weights from the
    square system Phi w = y. Training predictions then reproduce the
    targets to solver accuracy.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValidationError("training inputs must be a non-empty (n, d) array")
    dup = _find_duplicate_rows(x)
    if dup is not None:
        raise NumericsError(
            f"training rows {dup[0]} and {dup[1]} are identical; deduplicate inputs before interpolating"
        )
    phi = _activation_matrix(x, x, sigma)
    try:
        w = solve_linear(phi, y)
    except SingularMatrixError as exc:
        raise NumericsError(
            "interpolation matrix is singular; use a smaller width or deduplicate near-identical inputs"
        ) from exc
    return RbfModel(x.copy(), float(sigma), w)


def _find_duplicate_rows(x: np.ndarray):
    order = np.lexsort(x.T)
    for a, b in zip(order[:-1], order[1:]):
        if np.array_equal(x[a], x[b]):
            return (int(min(a, b)), int(max(a, b)))
    return None


def rbf_train_centers(
    x: np.ndarray,
    y: np.ndarray,
    m_centers: int,
    sigma: float | None = None,
    seed: int = 0,
    refine_sigma: bool = False,
) -> RbfModel:
    """Reduced network: centers by seeded farthest-point traversal, weights
    by least squares on the (n, m) activation matrix.

    `sigma` of None uses the mean nearest-neighbor center distance. With
    `refine_sigma` a short damped-least-squares pass adjusts the width
    (weights re-fitted at each trial). Rank-deficient fits fall back to a
    ridge solve and set `ridge_fallback` on the model.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not 1 <= m_centers <= x.shape[0]:
        raise ValidationError(f"m_centers must be in [1, {x.shape[0]}], got {m_centers}")
    idx = farthest_point_indices(x, m_centers, stream(seed, _RBF_CENTER_STREAM))
    centers = x[idx].copy()
    width = default_sigma(centers) if sigma is None else float(sigma)

    used_ridge = False

    def fit_weights(s: float) -> np.ndarray:
        nonlocal used_ridge
        a = _activation_matrix(x, centers, s)
        try:
            return least_squares(a, y)
        except SingularMatrixError:
            used_ridge = True
            return ridge_least_squares(a, y, RBF_RIDGE)

    if refine_sigma:
        def residual(params):
            s = max(float(params[0]), 1e-6)
            a = _activation_matrix(x, centers, s)
            return a @ fit_weights(s) - y

        def jacobian(params):
            h = 1e-6
            base = residual(params)
            bumped = residual(params + h)
            return ((bumped - base) / h)[:, None]

        width = max(float(lm_fit(residual, jacobian, np.array([width]), LmConfig(max_iterations=25)).params[0]), 1e-6)

    weights = fit_weights(width)
    model = RbfModel(centers, width, weights)
    model.ridge_fallback = used_ridge
    return model


def rbf_predict(model: RbfModel, x: np.ndarray):
    """sum_p w_p phi(||x - c_p||) for one vector or an (n, d) batch."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != model.centers.shape[1]:
        raise ValidationError(
            f"input dimension {x.shape[1]} does not match center dimension {model.centers.shape[1]}"
        )
    out = _activation_matrix(x, model.centers, model.sigma) @ model.weights
    return float(out[0]) if single else out


def rbf_to_dict(model: RbfModel) -> dict:
    return {
        "centers": [[float(v) for v in row] for row in model.centers],
        "sigma": float(model.sigma),
        "weights": [float(v) for v in model.weights],
    }


def rbf_from_dict(data: dict) -> RbfModel:
    return RbfModel(
        np.asarray(data["centers"], dtype=float),
        float(data["sigma"]),
        np.asarray(data["weights"], dtype=float),
    )
