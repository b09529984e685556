"""First-order Takagi-Sugeno neuro-fuzzy regression.

One rule per cluster. For input x, rule i fires with the product of its
Gaussian memberships,

    w_i = prod_j exp(-(x_j - c_ij)^2 / (2 sigma_ij^2)),

strengths are normalized to sum to one, and the output is the
strength-weighted sum of affine consequents f_i = m_i . x + r_i.

Training is hybrid: a particle swarm moves the membership centers and
widths while the consequent coefficients are re-fitted by linear least
squares at every cost evaluation (cost = training RMSE). Membership
centers are seeded from training points by farthest-point traversal.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NumericsError, SingularMatrixError, ValidationError
from .numerics import (
    GaConfig,
    PsoConfig,
    farthest_point_indices,
    ga_minimize,
    least_squares,
    pso_minimize,
    ridge_least_squares,
    stream,
)

SIGMA_FLOOR = 1e-3       # keeps every membership strictly positive
CENTER_BOUND = 2.0       # search box for centers, normalized units
SIGMA_CEILING = 3.0
CONSEQUENT_RIDGE = 1e-8
_INIT_STREAM = 7


@dataclass(frozen=True)
class GaussianMf:
    center: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError(f"membership width must be positive, got {self.sigma}")


@dataclass(frozen=True)
class AnfisRule:
    """Per-input memberships plus the affine consequent f = slopes . x + intercept."""

    memberships: tuple[GaussianMf, ...]
    slopes: tuple[float, ...]
    intercept: float


@dataclass
class AnfisModel:
    """Array-backed rule base: row i of each array belongs to rule i."""

    centers: np.ndarray      # (n_rules, input_dim)
    sigmas: np.ndarray       # (n_rules, input_dim)
    slopes: np.ndarray       # (n_rules, input_dim)
    intercepts: np.ndarray   # (n_rules,)
    input_dim: int
    ridge_fallback: bool = field(default=False, compare=False)

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float)
        self.sigmas = np.asarray(self.sigmas, dtype=float)
        self.slopes = np.asarray(self.slopes, dtype=float)
        self.intercepts = np.asarray(self.intercepts, dtype=float)
        shape = (self.n_rules, self.input_dim)
        for name in ("centers", "sigmas", "slopes"):
            if getattr(self, name).shape != shape:
                raise ValidationError(f"{name} must have shape {shape}")
        if np.any(self.sigmas <= 0):
            raise ValidationError("all membership widths must be positive")

    @property
    def n_rules(self) -> int:
        return len(self.intercepts)

    def rules(self) -> list[AnfisRule]:
        out = []
        for i in range(self.n_rules):
            mfs = tuple(GaussianMf(float(c), float(s)) for c, s in zip(self.centers[i], self.sigmas[i]))
            out.append(AnfisRule(mfs, tuple(float(v) for v in self.slopes[i]), float(self.intercepts[i])))
        return out


def firing_strengths(model: AnfisModel, x: np.ndarray) -> np.ndarray:
    """Product-of-memberships strength of every rule at x, each in (0, 1]."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.input_dim,):
        raise ValidationError(f"expected input of dimension {model.input_dim}, got shape {x.shape}")
    return _firing_matrix(model, x[None, :])[0]


def _firing_matrix(model: AnfisModel, x: np.ndarray) -> np.ndarray:
    """(n, n_rules) strengths for a batch of inputs."""
    z = (x[:, None, :] - model.centers[None, :, :]) / model.sigmas[None, :, :]
    return np.exp(-0.5 * np.sum(z ** 2, axis=2))


def normalize_strengths(w: np.ndarray) -> np.ndarray:
    """w_i / sum(w); raises when every strength has underflowed to zero."""
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ValidationError("firing strengths cannot be negative")
    total = w.sum()
    if total <= 0.0:
        raise NumericsError("all firing strengths underflowed to zero for this input")
    return w / total


def forward(model: AnfisModel, x: np.ndarray) -> float:
    """Normalized-strength-weighted sum of the rule consequents."""
    x = np.asarray(x, dtype=float)
    w_bar = normalize_strengths(firing_strengths(model, x))
    return float(w_bar @ (model.slopes @ x + model.intercepts))


def predict(model: AnfisModel, x: np.ndarray) -> np.ndarray:
    """Batch forward pass over an (n, input_dim) block."""
    x = np.asarray(x, dtype=float)
    w = _firing_matrix(model, x)
    totals = w.sum(axis=1)
    if np.any(totals <= 0.0):
        raise NumericsError("all firing strengths underflowed to zero for some input")
    w_bar = w / totals[:, None]
    return np.sum(w_bar * (x @ model.slopes.T + model.intercepts[None, :]), axis=1)


def count_parameters(n_clusters: int, n_variables: int, n_mf_parameters: int) -> int:
    """Membership parameter count n_clusters * n_variables * n_mf_parameters.

    Kept as a pure formula; the run report prints it for both the 5-input
    reading and the 6-variable reading since the two disagree for the
    reference configuration.
    """
    if min(n_clusters, n_variables, n_mf_parameters) < 1:
        raise ValidationError("all counts must be >= 1")
    return n_clusters * n_variables * n_mf_parameters


def _initial_memberships(x: np.ndarray, n_clusters: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = stream(seed, _INIT_STREAM)
    idx = farthest_point_indices(x, n_clusters, rng)
    centers = x[idx].copy()
    if n_clusters > 1:
        # width per input: half the mean pairwise center separation
        sep = np.abs(centers[:, None, :] - centers[None, :, :])
        off_diag = ~np.eye(n_clusters, dtype=bool)
        sigmas0 = 0.5 * sep[off_diag].reshape(-1, x.shape[1]).mean(axis=0)
    else:
        span = x.max(axis=0) - x.min(axis=0)
        sigmas0 = 0.5 * np.where(span > 0, span, 1.0)
    sigmas0 = np.clip(sigmas0, SIGMA_FLOOR, SIGMA_CEILING)
    return centers, np.tile(sigmas0, (n_clusters, 1))


def _fit_consequents(w_bar: np.ndarray, x: np.ndarray, y: np.ndarray, n_clusters: int, ridge: float):
    """Fit all rule consequents on the weighted regressors [w_bar_i * x, w_bar_i].

    With ridge = 0 this is plain least squares (falling back to a tiny
    ridge only on rank failure); a positive ridge is always applied and
    bounds the coefficients when the weighted regressors are collinear.
    Returns (slopes, intercepts, used_fallback).
    """
    n, d = x.shape
    design = np.empty((n, n_clusters * (d + 1)))
    for i in range(n_clusters):
        design[:, i * (d + 1): i * (d + 1) + d] = w_bar[:, i, None] * x
        design[:, i * (d + 1) + d] = w_bar[:, i]
    used_fallback = False
    if ridge > 0.0:
        theta = ridge_least_squares(design, y, ridge)
    else:
        try:
            theta = least_squares(design, y)
        except (SingularMatrixError, ValueError):
            theta = ridge_least_squares(design, y, CONSEQUENT_RIDGE)
            used_fallback = True
    theta = theta.reshape(n_clusters, d + 1)
    return theta[:, :d], theta[:, d], used_fallback


def train(
    x: np.ndarray,
    y: np.ndarray,
    n_clusters: int,
    optimizer_cfg: PsoConfig,
    consequent_ridge: float = 0.0,
) -> tuple[AnfisModel, np.ndarray]:
    """Fit an ANFIS on normalized data; returns (model, best-cost history).

    The optimizer moves the packed membership genes (all centers, then all
    widths); particle 0 starts at the farthest-point initialization. If a
    consequent fit is rank-deficient the ridge fallback is used and flagged
    on the returned model.

    `consequent_ridge` > 0 regularizes every consequent fit; plain least
    squares memorizes noise through near-collinear weighted regressors, so
    pipeline runs on measured data should keep a small positive value.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValidationError("training inputs must be a non-empty (n, d) array")
    if n_clusters < 1:
        raise ValidationError("n_clusters must be >= 1")
    if n_clusters * (x.shape[1] + 1) > x.shape[0]:
        raise ValidationError(
            f"{n_clusters} clusters need at least {n_clusters * (x.shape[1] + 1)} training rows"
        )
    if consequent_ridge < 0:
        raise ValidationError("consequent_ridge must be >= 0")
    n, d = x.shape

    centers0, sigmas0 = _initial_memberships(x, n_clusters, optimizer_cfg.seed)
    init = np.concatenate([centers0.ravel(), sigmas0.ravel()])
    bounds = [(-CENTER_BOUND, CENTER_BOUND)] * (n_clusters * d) + [
        (SIGMA_FLOOR, SIGMA_CEILING)
    ] * (n_clusters * d)

    saw_ridge = False

    def build(genes) -> AnfisModel:
        nonlocal saw_ridge
        centers = genes[: n_clusters * d].reshape(n_clusters, d)
        sigmas = genes[n_clusters * d:].reshape(n_clusters, d)
        m = AnfisModel(centers, sigmas, np.zeros((n_clusters, d)), np.zeros(n_clusters), d)
        w = _firing_matrix(m, x)
        totals = w.sum(axis=1)
        if np.any(totals <= 0.0):
            return None
        w_bar = w / totals[:, None]
        slopes, intercepts, used_fallback = _fit_consequents(w_bar, x, y, n_clusters, consequent_ridge)
        saw_ridge = saw_ridge or used_fallback
        m.slopes, m.intercepts = slopes, intercepts
        return m

    def cost(genes):
        m = build(genes)
        if m is None:
            return np.inf
        err = predict(m, x) - y
        return float(np.sqrt(np.mean(err ** 2)))

    if isinstance(optimizer_cfg, PsoConfig):
        result = pso_minimize(cost, replace(optimizer_cfg, bounds=bounds), init=init)
    elif isinstance(optimizer_cfg, GaConfig):
        result = ga_minimize(cost, replace(optimizer_cfg, bounds=bounds))
    else:
        raise ValidationError(f"unsupported optimizer config type {type(optimizer_cfg).__name__}")

    model = build(result.point)
    if model is None:
        raise NumericsError("optimizer returned membership genes with zero total firing strength")
    model.ridge_fallback = saw_ridge
    return model, result.history


def to_dict(model: AnfisModel) -> dict:
    return {
        "rules": [
            {
                "centers": [float(v) for v in model.centers[i]],
                "sigmas": [float(v) for v in model.sigmas[i]],
                "slopes": [float(v) for v in model.slopes[i]],
                "intercept": float(model.intercepts[i]),
            }
            for i in range(model.n_rules)
        ],
        "input_dim": model.input_dim,
    }


def from_dict(data: dict) -> AnfisModel:
    rules = data["rules"]
    return AnfisModel(
        np.asarray([r["centers"] for r in rules], dtype=float),
        np.asarray([r["sigmas"] for r in rules], dtype=float),
        np.asarray([r["slopes"] for r in rules], dtype=float),
        np.asarray([r["intercept"] for r in rules], dtype=float),
        int(data["input_dim"]),
    )
