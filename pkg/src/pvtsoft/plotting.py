"""Figure rendering for the CLI report path.

Each helper takes already-computed analysis data and writes one PNG next
to the delimited output, so plots and tables always agree. Everything
renders through the Agg backend; nothing here opens a window.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dataset import Dataset, COLUMNS
from .evaluation import FLAG_VALID, LeverageReport, PlotTable

DPI = 150


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_parity(partitions: dict[str, tuple[np.ndarray, np.ndarray]], path) -> None:
    """Experimental vs predicted values, one marker set per partition."""
    fig, ax = plt.subplots(figsize=(5.5, 5))
    lo, hi = np.inf, -np.inf
    for label, (y_exp, y_cal) in partitions.items():
        ax.scatter(y_exp, y_cal, s=18, alpha=0.75, label=label)
        lo = min(lo, float(np.min(y_exp)), float(np.min(y_cal)))
        hi = max(hi, float(np.max(y_exp)), float(np.max(y_cal)))
    pad = 0.03 * (hi - lo) if hi > lo else 1.0
    ax.plot([lo - pad, hi + pad], [lo - pad, hi + pad], "k--", lw=1, label="x = y")
    ax.set_xlabel("experimental electrical efficiency [%]")
    ax.set_ylabel("predicted electrical efficiency [%]")
    ax.legend()
    _finish(fig, path)


def save_history(history: np.ndarray, path, ylabel: str = "best cost") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.arange(1, len(history) + 1), history)
    if np.all(np.asarray(history) > 0):
        ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    _finish(fig, path)


def save_williams(report: LeverageReport, path) -> None:
    """Standardized residuals against leverage with the cutoff lines."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    h = report.hat_diagonal
    r = report.standardized_residuals
    ok = np.array([f == FLAG_VALID for f in report.flags])
    ax.scatter(h[ok], r[ok], s=20, label="valid")
    if np.any(~ok):
        ax.scatter(h[~ok], r[~ok], s=28, color="crimson", label="outlying")
    ax.axhline(3.0, color="gray", ls="--", lw=1)
    ax.axhline(-3.0, color="gray", ls="--", lw=1)
    ax.axvline(report.warning_leverage, color="gray", ls=":", lw=1.2)
    ax.set_xlabel("leverage (hat value)")
    ax.set_ylabel("standardized residual")
    ax.legend()
    _finish(fig, path)


def save_andrews(table: PlotTable, path) -> None:
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    rows = np.asarray([(rid, t, f) for rid, t, f in table.rows], dtype=float)
    for rid in np.unique(rows[:, 0]):
        sel = rows[rows[:, 0] == rid]
        ax.plot(sel[:, 1], sel[:, 2], lw=0.6, alpha=0.6, color="tab:blue")
    ax.set_xlabel("t")
    ax.set_ylabel("f(t)")
    ax.set_xlim(-math.pi, math.pi)
    _finish(fig, path)


def save_parallel(table: PlotTable, path) -> None:
    columns = []
    for _, col, _ in table.rows:
        if col not in columns:
            columns.append(col)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    by_record: dict[int, list[float]] = {}
    for rid, col, value in table.rows:
        by_record.setdefault(rid, []).append(value)
    xs = np.arange(len(columns))
    for values in by_record.values():
        ax.plot(xs, values, lw=0.6, alpha=0.6, color="tab:blue")
    ax.set_xticks(xs)
    ax.set_xticklabels(columns, rotation=30, ha="right")
    ax.set_ylabel("normalized value")
    _finish(fig, path)


def save_scatter_matrix(d: Dataset, path) -> None:
    cols = COLUMNS if d.has_target else COLUMNS[:5]
    k = len(cols)
    fig, axes = plt.subplots(k, k, figsize=(2.1 * k, 2.1 * k))
    for i in range(k):
        for j in range(k):
            ax = axes[i, j]
            if i == j:
                ax.annotate(cols[i], (0.5, 0.5), xycoords="axes fraction",
                            ha="center", va="center", fontsize=8)
            else:
                ax.scatter(d.values[:, j], d.values[:, i], s=4, alpha=0.5)
            ax.set_xticks([])
            ax.set_yticks([])
    _finish(fig, path)


def save_relevancy(factors: dict[str, float], path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    names = list(factors)
    values = [factors[n] for n in names]
    colors = ["tab:blue" if v >= 0 else "tab:red" for v in values]
    ax.bar(names, values, color=colors)
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_ylabel("relevancy factor")
    ax.set_ylim(-1.05, 1.05)
    plt.setp(ax.get_xticklabels(), rotation=30, ha="right")
    _finish(fig, path)
