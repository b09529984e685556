"""Statistical evaluation: error metrics, leverage-based outlier
diagnostics, relevancy-factor sensitivity, and plot-data export.

This module emits numbers and tables only; figure rendering lives in
`plotting` so the analysis path stays free of any graphics dependency.

Metric conventions (y_exp experimental, y_cal calculated, e = y_exp - y_cal):

    MSE  = mean(e^2)                     RMSE = sqrt(MSE)
    ARD% = (100/N) sum |e_i| / y_exp_i   MAE  = mean |e|
    STD  = sqrt(sum(e^2) / (N - 1))      R^2  = 1 - sum(e^2)/sum((y_exp - mean)^2)

ARD is undefined (None) when any experimental value is zero, STD when
N = 1; the fractional MRE is ARD/100.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .dataset import COLUMNS, Dataset
from .errors import NumericsError, ValidationError
from .numerics import solve_linear

RESIDUAL_CUTOFF = 3.0
# Quoted warning-leverage figure from the reference analysis of the original
# 98-point campaign; the formula value 3(k+1)/n = 18/98 differs, so
# diagnostics report both rather than reconciling them.
REFERENCE_WARNING_LEVERAGE = 0.09

FLAG_VALID = "valid"
FLAG_LEVERAGE = "leverage_outlier"
FLAG_RESIDUAL = "residual_outlier"
FLAG_BOTH = "leverage_and_residual_outlier"

ANDREWS_SAMPLES = 201


@dataclass(frozen=True)
class MetricsReport:
    """Error metrics over one partition; ard_percent/std/r2 are None when
    their defining expression is undefined for the data."""

    mse: float
    rmse: float
    ard_percent: float | None
    mae: float
    r2: float | None
    std: float | None
    n: int
    partition: str = "total"

    @property
    def mre(self) -> float | None:
        """Fractional counterpart of ARD."""
        return None if self.ard_percent is None else self.ard_percent / 100.0

    def to_dict(self) -> dict:
        return {
            "partition": self.partition,
            "n": self.n,
            "mse": self.mse,
            "rmse": self.rmse,
            "mre": self.mre,
            "ard_percent": self.ard_percent,
            "mae": self.mae,
            "r2": self.r2,
            "std": self.std,
        }


def metrics(y_exp: np.ndarray, y_cal: np.ndarray, partition: str = "total") -> MetricsReport:
    y_exp = np.asarray(y_exp, dtype=float)
    y_cal = np.asarray(y_cal, dtype=float)
    if y_exp.shape != y_cal.shape or y_exp.ndim != 1 or y_exp.size == 0:
        raise ValidationError("metrics need two equal-length non-empty vectors")
    n = y_exp.size
    e = y_exp - y_cal
    mse = float(np.mean(e ** 2))
    rmse = math.sqrt(mse)
    mae = float(np.mean(np.abs(e)))
    ard = None if np.any(y_exp == 0.0) else float(100.0 / n * np.sum(np.abs(e) / y_exp))
    std = None if n < 2 else float(math.sqrt(np.sum(e ** 2) / (n - 1)))
    denom = float(np.sum((y_exp - y_exp.mean()) ** 2))
    r2 = None if denom == 0.0 else float(1.0 - np.sum(e ** 2) / denom)
    return MetricsReport(mse, rmse, ard, mae, r2, std, n, partition)


def hat_diagonal(x: np.ndarray) -> np.ndarray:
    """Diagonal of the projection X (X'X)^-1 X'. Requires n >= k and a
    full-rank X; the diagonal sums to k."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValidationError("design matrix must be 2-D")
    n, k = x.shape
    if n < k:
        raise ValidationError(f"need at least as many rows as columns, got {n} x {k}")
    z = solve_linear(x.T @ x, x.T)  # (k, n)
    return np.einsum("ij,ji->i", x, z)


def warning_leverage(k: int, n: int) -> float:
    """Cutoff 3 (k + 1) / n of the leverage axis."""
    if n <= 0:
        raise ValidationError("n must be positive")
    if k < 0:
        raise ValidationError("k must be non-negative")
    return 3.0 * (k + 1) / n


def standardized_residuals(
    y_exp: np.ndarray, y_cal: np.ndarray, h: np.ndarray, k: int | None = None
) -> np.ndarray:
    """Internally studentized residuals R_i = e_i / (s sqrt(1 - h_ii)) with
    s = sqrt(sum e^2 / (n - k - 1)).

    `k` defaults to round(sum(h)), the trace of the projection; pass it
    explicitly when the design size is known. Points with h_ii at 1 sit at
    exact leverage and get NaN (undefined) entries.
    """
    y_exp = np.asarray(y_exp, dtype=float)
    y_cal = np.asarray(y_cal, dtype=float)
    h = np.asarray(h, dtype=float)
    if not (y_exp.shape == y_cal.shape == h.shape):
        raise ValidationError("residual inputs must share one length")
    n = y_exp.size
    if k is None:
        k = int(round(float(h.sum())))
    dof = n - k - 1
    if dof <= 0:
        raise ValidationError(f"cannot studentize with n={n}, k={k} (no residual degrees of freedom)")
    e = y_exp - y_cal
    s = math.sqrt(float(np.sum(e ** 2)) / dof)
    if s == 0.0:
        return np.zeros(n)
    exact = h >= 1.0 - 1e-12
    denom = s * np.sqrt(np.clip(1.0 - h, 0.0, None))
    out = np.full(n, np.nan)
    out[~exact] = e[~exact] / denom[~exact]
    return out


def williams_classify(h: np.ndarray, r: np.ndarray, h_star: float) -> list[str]:
    """Per-point region of the residual-vs-leverage plane: valid means
    |R| <= 3 and h <= h_star. NaN residuals (exact-leverage points) count
    only as leverage breaches."""
    h = np.asarray(h, dtype=float)
    r = np.asarray(r, dtype=float)
    if h.shape != r.shape:
        raise ValidationError("h and R must share one length")
    flags = []
    for hi, ri in zip(h, r):
        lev = hi > h_star
        res = (not np.isnan(ri)) and abs(ri) > RESIDUAL_CUTOFF
        if lev and res:
            flags.append(FLAG_BOTH)
        elif lev:
            flags.append(FLAG_LEVERAGE)
        elif res:
            flags.append(FLAG_RESIDUAL)
        else:
            flags.append(FLAG_VALID)
    return flags


@dataclass(frozen=True)
class LeverageReport:
    hat_diagonal: np.ndarray
    standardized_residuals: np.ndarray
    warning_leverage: float
    flags: list[str]

    def outlier_count(self) -> int:
        return sum(1 for f in self.flags if f != FLAG_VALID)

    def to_dict(self) -> dict:
        return {
            "warning_leverage": self.warning_leverage,
            "reference_warning_leverage": REFERENCE_WARNING_LEVERAGE,
            "residual_cutoff": RESIDUAL_CUTOFF,
            "hat_diagonal": [float(v) for v in self.hat_diagonal],
            "standardized_residuals": [None if np.isnan(v) else float(v) for v in self.standardized_residuals],
            "flags": list(self.flags),
            "n_valid": sum(1 for f in self.flags if f == FLAG_VALID),
            "n_outlying": self.outlier_count(),
        }


def leverage_analysis(
    x: np.ndarray, y_exp: np.ndarray, y_cal: np.ndarray, k: int | None = None
) -> LeverageReport:
    """Full diagnostic: hat values from the design block, studentized
    residuals of the predictions, and region flags."""
    x = np.asarray(x, dtype=float)
    h = hat_diagonal(x)
    n, k_design = x.shape
    k_eff = k_design if k is None else k
    r = standardized_residuals(y_exp, y_cal, h, k=k_eff)
    h_star = warning_leverage(k_eff, n)
    return LeverageReport(h, r, h_star, williams_classify(h, r, h_star))


@dataclass(frozen=True)
class RelevancyReport:
    """Pearson-form relevancy factor of each input column against the target."""

    factors: dict[str, float]

    def to_dict(self) -> dict:
        return {"factors": dict(self.factors)}

    def ranked(self) -> list[tuple[str, float]]:
        return sorted(self.factors.items(), key=lambda kv: abs(kv[1]), reverse=True)


def relevancy_factor(x_col: np.ndarray, y: np.ndarray) -> float:
    """r = sum((x - x_bar)(y - y_bar)) / sqrt(sum (x - x_bar)^2 sum (y - y_bar)^2)."""
    x_col = np.asarray(x_col, dtype=float)
    y = np.asarray(y, dtype=float)
    if x_col.shape != y.shape or x_col.ndim != 1 or x_col.size < 2:
        raise ValidationError("relevancy needs two equal-length vectors of at least 2 samples")
    dx = x_col - x_col.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(np.sum(dx ** 2)) * float(np.sum(dy ** 2)))
    if denom == 0.0:
        raise NumericsError("relevancy factor undefined for a constant column")
    return float(np.sum(dx * dy) / denom)


def andrews_curve(x: np.ndarray, t):
    """Finite Fourier embedding of a record (up to 6 components):

        f(t) = x1/sqrt(2) + x2 sin t + x3 cos t + x4 sin 2t + x5 cos 2t + x6 sin 3t
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or not 1 <= x.size <= 6:
        raise ValidationError("record must have between 1 and 6 components")
    t = np.asarray(t, dtype=float)
    basis = [
        np.full_like(t, 1.0 / math.sqrt(2.0)),
        np.sin(t),
        np.cos(t),
        np.sin(2 * t),
        np.cos(2 * t),
        np.sin(3 * t),
    ]
    out = sum(x[i] * basis[i] for i in range(x.size))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PlotTable:
    """Tabular plot data: a header, one tuple per row, and for the scatter
    kind the per-pair Pearson correlations keyed by (col_a, col_b)."""

    kind: str
    header: tuple[str, ...]
    rows: list[tuple]
    pair_correlations: dict[tuple[str, str], float] | None = None

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.header)
            for row in self.rows:
                writer.writerow([v if isinstance(v, str) else repr(float(v)) for v in row])


def plot_data(d: Dataset, kind: str, t_samples: int = ANDREWS_SAMPLES) -> PlotTable:
    """Shape a dataset for one of the three diagram kinds.

    andrews and parallel_coords expect the caller to pass normalized data
    (the Fourier basis follows the fixed schema order); scatter_matrix uses
    the values as given and also reports each pair's Pearson r.
    """
    if d.n == 0:
        raise ValidationError("cannot export plot data for an empty dataset")
    columns = COLUMNS if d.has_target else COLUMNS[:5]

    if kind == "andrews":
        t = np.linspace(-math.pi, math.pi, t_samples)
        rows = []
        for i in range(d.n):
            record = d.values[i, : len(columns)]
            f = andrews_curve(record, t)
            rows.extend((i, tv, fv) for tv, fv in zip(t, f))
        return PlotTable(kind, ("record_id", "t", "f"), rows)

    if kind == "scatter_matrix":
        rows = []
        correlations = {}
        for a in range(len(columns)):
            for b in range(a + 1, len(columns)):
                xa, xb = d.values[:, a], d.values[:, b]
                rows.extend(
                    (columns[a], columns[b], va, vb) for va, vb in zip(xa, xb)
                )
                try:
                    correlations[(columns[a], columns[b])] = relevancy_factor(xa, xb)
                except (NumericsError, ValidationError):
                    correlations[(columns[a], columns[b])] = float("nan")
        return PlotTable(kind, ("col_a", "col_b", "x", "y"), rows, correlations)

    if kind == "parallel_coords":
        rows = [
            (i, columns[j], d.values[i, j])
            for i in range(d.n)
            for j in range(len(columns))
        ]
        return PlotTable(kind, ("record_id", "column", "value"), rows)

    raise ValidationError(f"unknown plot kind {kind!r}; expected andrews, scatter_matrix, or parallel_coords")
