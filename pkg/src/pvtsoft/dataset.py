"""Collector dataset handling: CSV ingestion, min-max scaling, splitting,
and a deterministic synthetic data generator.

The column schema is fixed and ordered; it is part of the external file
contract and also fixes the basis order of the Andrews-curve export:

    inlet_temp [degC], flow_rate [L/min], heat [W], solar_radiation [W/m2],
    sun_heat [W], electrical_efficiency [%]

The first five are model inputs, the last is the regression target.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CsvParseError, DegenerateColumnError, SchemaError, ValidationError
from .numerics.rng import stream

COLUMNS = ("inlet_temp", "flow_rate", "heat", "solar_radiation", "sun_heat", "electrical_efficiency")
INPUT_COLUMNS = COLUMNS[:5]
TARGET_COLUMN = COLUMNS[5]

# Synthetic rig constants. sun_heat is irradiance times the aperture area;
# the cell warms above the inlet by a flow-damped irradiance term and the
# panel derates linearly from its nominal 12.5% at 25 degC. c3 is an
# effective fluid heat-gain coefficient chosen so heat stays below the
# incident power over the whole operating box.
APERTURE_M2 = 0.7
NOMINAL_EFFICIENCY = 12.5
DERATE_PER_DEGC = 0.004
CELL_TEMP_REF = 25.0
C1_CELL_RISE = 0.05        # degC per (W/m2) per (L/min)
C2_FLOW_OFFSET = 0.5       # L/min
C3_HEAT_GAIN = 12.0        # W per (L/min) per degC
INLET_TEMP_RANGE = (20.0, 45.0)
FLOW_RATE_RANGE = (0.5, 4.0)
SOLAR_RADIATION_RANGE = (600.0, 1000.0)


@dataclass(frozen=True)
class RawRecord:
    """One measurement row; electrical_efficiency is None for
    prediction-only inputs."""

    inlet_temp: float
    flow_rate: float
    heat: float
    solar_radiation: float
    sun_heat: float
    electrical_efficiency: float | None = None


@dataclass(frozen=True)
class Dataset:
    """An ordered table of records backed by an (n, 6) float array.

    Rows without a target carry NaN in the last column and has_target is
    False. Instances are immutable and safe to share.
    """

    values: np.ndarray
    has_target: bool = True

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] != len(COLUMNS):
            raise ValidationError(f"dataset array must be (n, {len(COLUMNS)}), got {v.shape}")
        object.__setattr__(self, "values", v)
        v.setflags(write=False)

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        if name not in COLUMNS:
            raise ValidationError(f"unknown column {name!r}")
        return self.values[:, COLUMNS.index(name)]

    def inputs(self) -> np.ndarray:
        """The (n, 5) input block."""
        return self.values[:, :5]

    def targets(self) -> np.ndarray:
        if not self.has_target:
            raise ValidationError("dataset has no target column values")
        return self.values[:, 5]

    def records(self) -> list[RawRecord]:
        out = []
        for row in self.values:
            target = None if np.isnan(row[5]) else float(row[5])
            out.append(RawRecord(*(float(x) for x in row[:5]), target))
        return out

    def take(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.values[np.asarray(indices, dtype=int)].copy(), self.has_target)


@dataclass(frozen=True)
class Scaler:
    """Per-column (min, max) pairs defining the [-1, 1] min-max map
    x_n = 2 (x - min) / (max - min) - 1."""

    columns: dict[str, tuple[float, float]]

    def __post_init__(self):
        for name, (lo, hi) in self.columns.items():
            if not hi > lo:
                raise DegenerateColumnError(f"column {name!r} has max <= min ({hi} <= {lo})")

    def normalize_value(self, x, column: str):
        lo, hi = self._range(column)
        return 2.0 * (np.asarray(x, dtype=float) - lo) / (hi - lo) - 1.0

    def denormalize_value(self, x, column: str):
        lo, hi = self._range(column)
        return (np.asarray(x, dtype=float) + 1.0) / 2.0 * (hi - lo) + lo

    def _range(self, column: str) -> tuple[float, float]:
        if column not in self.columns:
            raise ValidationError(f"scaler has no column {column!r}")
        return self.columns[column]

    def transform(self, d: Dataset) -> Dataset:
        """Apply the fitted map to another dataset (values may leave [-1, 1])."""
        out = np.empty_like(d.values)
        for j, name in enumerate(COLUMNS):
            if j == 5 and not d.has_target:
                out[:, j] = np.nan
            else:
                out[:, j] = self.normalize_value(d.values[:, j], name)
        return Dataset(out, d.has_target)

    def to_dict(self) -> dict:
        return {name: {"min": lo, "max": hi} for name, (lo, hi) in self.columns.items()}

    @classmethod
    def from_dict(cls, data: dict) -> "Scaler":
        return cls({name: (float(v["min"]), float(v["max"])) for name, v in data.items()})


@dataclass(frozen=True)
class SplitResult:
    train: Dataset
    test: Dataset
    seed: int
    train_indices: np.ndarray
    test_indices: np.ndarray


def load_csv(path) -> Dataset:
    """Read a dataset CSV (UTF-8, comma separated, dot decimal).

    The header must match the full 6-column schema, or the 5-column input
    schema for prediction-only files. Physical invariants are checked:
    finite values, flow_rate > 0, solar_radiation >= 0.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        if header == list(COLUMNS):
            has_target = True
        elif header == list(INPUT_COLUMNS):
            has_target = False
        else:
            expected = list(COLUMNS)
            for i, name in enumerate(expected):
                if i >= len(header):
                    raise SchemaError(f"{path}: missing column {name!r}")
                if header[i] != name:
                    raise SchemaError(f"{path}: expected column {name!r}, found {header[i]!r}")
            raise SchemaError(f"{path}: unexpected extra columns {header[len(expected):]!r}")

        n_cols = 6 if has_target else 5
        rows = []
        for row_idx, row in enumerate(reader, start=1):
            if len(row) != n_cols:
                raise CsvParseError(f"{path}: row {row_idx} has {len(row)} cells, expected {n_cols}")
            parsed = []
            for col_idx, cell in enumerate(row):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise CsvParseError(
                        f"{path}: row {row_idx}, column {COLUMNS[col_idx]!r}: "
                        f"cannot parse {cell.strip()!r} as a number"
                    ) from None
            if not has_target:
                parsed.append(np.nan)
            rows.append(parsed)

    values = np.asarray(rows, dtype=float).reshape(len(rows), 6)
    _check_physical(values, path)
    return Dataset(values, has_target)


def _check_physical(values: np.ndarray, path) -> None:
    finite = np.isfinite(values[:, :5])
    if not finite.all():
        r, c = np.argwhere(~finite)[0]
        raise CsvParseError(f"{path}: row {r + 1}, column {COLUMNS[c]!r}: non-finite value")
    bad_flow = np.where(values[:, 1] <= 0)[0]
    if bad_flow.size:
        raise CsvParseError(f"{path}: row {bad_flow[0] + 1}: flow_rate must be > 0")
    bad_rad = np.where(values[:, 3] < 0)[0]
    if bad_rad.size:
        raise CsvParseError(f"{path}: row {bad_rad[0] + 1}: solar_radiation must be >= 0")


def save_csv(d: Dataset, path) -> None:
    """Write a dataset with the exact schema header; floats use repr so a
    reread reproduces the values bit-for-bit."""
    header = COLUMNS if d.has_target else INPUT_COLUMNS
    width = len(header)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in d.values:
            writer.writerow([repr(float(x)) for x in row[:width]])


def fit_normalize(d: Dataset) -> tuple[Dataset, Scaler]:
    """Fit per-column (min, max) on `d` and map it into [-1, 1].

    Raises DegenerateColumnError when a column is constant. By fit
    construction each fitted column attains -1 and +1 exactly.
    """
    if d.n == 0:
        raise ValidationError("cannot fit a scaler on an empty dataset")
    cols = {}
    for j, name in enumerate(COLUMNS):
        if j == 5 and not d.has_target:
            continue
        lo, hi = float(np.min(d.values[:, j])), float(np.max(d.values[:, j]))
        if not hi > lo:
            raise DegenerateColumnError(f"column {name!r} is constant ({lo}); min-max map undefined")
        cols[name] = (lo, hi)
    scaler = Scaler(cols)
    return scaler.transform(d), scaler


def denormalize(x, scaler: Scaler, column: str):
    """Exact inverse of the fitted map for one column."""
    return scaler.denormalize_value(x, column)


def split(d: Dataset, train_fraction: float, seed: int) -> SplitResult:
    """Shuffle by a seeded permutation and cut into train/test partitions.

    Train size is round(n * fraction) with ties going to train, which
    reproduces the reference 74/24 split at n = 98 and fraction 0.75.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValidationError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = d.n
    n_train = int(np.floor(n * train_fraction + 0.5))
    if n_train == 0 or n_train == n:
        raise ValidationError(f"split of {n} records at fraction {train_fraction} leaves an empty partition")
    perm = stream(seed).permutation(n)
    train_idx, test_idx = perm[:n_train], perm[n_train:]
    return SplitResult(d.take(train_idx), d.take(test_idx), seed, train_idx, test_idx)


def generate_synthetic(n: int, seed: int, noise_sd: float) -> Dataset:
    """Deterministic stand-in for the unpublished measurement campaign.

    Inputs are uniform over the rig's operating ranges; heat, sun heat, and
    efficiency follow the declared linear energy balance

        T_cell = inlet_temp + C1 * solar_radiation / (C2 + flow_rate)
        heat   = C3 * flow_rate * (T_cell - inlet_temp)
        eff    = 12.5 * (1 - 0.004 * (T_cell - 25)) + N(0, noise_sd)

    which is a plausibility model, not a claim about the real collector.
    """
    if n < 0:
        raise ValidationError(f"record count must be >= 0, got {n}")
    if noise_sd < 0:
        raise ValidationError(f"noise_sd must be >= 0, got {noise_sd}")
    rng = stream(seed)
    inlet = rng.uniform(*INLET_TEMP_RANGE, size=n)
    flow = rng.uniform(*FLOW_RATE_RANGE, size=n)
    solar = rng.uniform(*SOLAR_RADIATION_RANGE, size=n)
    sun_heat = solar * APERTURE_M2
    t_cell = inlet + C1_CELL_RISE * solar / (C2_FLOW_OFFSET + flow)
    heat = C3_HEAT_GAIN * flow * (t_cell - inlet)
    eff = NOMINAL_EFFICIENCY * (1.0 - DERATE_PER_DEGC * (t_cell - CELL_TEMP_REF))
    if noise_sd > 0:
        eff = eff + rng.normal(0.0, noise_sd, size=n)
    values = np.column_stack([inlet, flow, heat, solar, sun_heat, eff]) if n else np.empty((0, 6))
    return Dataset(values, has_target=True)
