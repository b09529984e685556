"""Run configuration for the training pipeline.

A config is a JSON object with a top-level "model" discriminator; model
hyperparameters live under "params" and default to the reference
configuration below (the values reported for the original 98-point
campaign). CLI flags override the file's data/out/seed entries.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError, ValidationError

MODEL_NAMES = ("lssvm", "anfis", "mlp-bp", "mlp-lm", "rbf-interp", "rbf-centers")

DEFAULT_SPLIT_FRACTION = 0.75
DEFAULT_SEED = 42

# Reference defaults per model. GA tunes the LSSVM and PSO trains the
# ANFIS unless the config picks the other optimizer.
MODEL_DEFAULTS: dict[str, dict] = {
    "lssvm": {
        "tune": True,
        "optimizer": "ga",
        "population": 100,
        "iterations": 1000,
        "gamma": 6942.0845,
        "sigma2": 8.01234,
        "gamma_bounds": [1e-2, 1e7],
        "sigma2_bounds": [1e-3, 1e3],
        "crossover_rate": 0.9,
        "mutation_rate": 0.1,
        "mutation_sd": None,
        "c1": 1.0,
        "c2": 2.0,
        "inertia": 0.729,
    },
    "anfis": {
        "clusters": 7,
        "optimizer": "pso",
        "population": 50,
        "iterations": 1000,
        "c1": 1.0,
        "c2": 2.0,
        "inertia": 0.729,
        "crossover_rate": 0.9,
        "mutation_rate": 0.1,
        "mutation_sd": None,
        # bounds the consequent coefficients on noisy data; 0 gives the
        # plain least-squares fit
        "consequent_ridge": 0.1,
    },
    "mlp-lm": {"hidden": 7, "max_iterations": 1500, "early_stopping": True},
    "mlp-bp": {"hidden": 7, "learning_rate": 0.05, "epochs": 3000, "early_stopping": True},
    "rbf-interp": {"sigma": None},
    "rbf-centers": {"centers": 50, "sigma": None, "refine_sigma": False},
}


@dataclass
class RunConfig:
    model: str
    data: str
    out: str
    seed: int = DEFAULT_SEED
    split_fraction: float = DEFAULT_SPLIT_FRACTION
    params: dict = field(default_factory=dict)
    figures: bool = True

    def __post_init__(self):
        if self.model not in MODEL_NAMES:
            raise ValidationError(f"unknown model {self.model!r}; expected one of {', '.join(MODEL_NAMES)}")
        if not 0.0 < self.split_fraction < 1.0:
            raise ValidationError(f"split_fraction must be in (0, 1), got {self.split_fraction}")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")
        defaults = MODEL_DEFAULTS[self.model]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ValidationError(
                f"unknown parameter(s) {sorted(unknown)} for model {self.model!r}; "
                f"accepted: {sorted(defaults)}"
            )
        self.params = {**defaults, **self.params}

    def resolved(self) -> dict:
        """Full echo of the configuration a run actually used."""
        return {
            "model": self.model,
            "data": str(self.data),
            "out": str(self.out),
            "seed": self.seed,
            "split_fraction": self.split_fraction,
            "params": dict(self.params),
        }


def load_config(path, data=None, out=None, seed=None) -> RunConfig:
    """Read a config file, applying CLI overrides where given."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: config must be a JSON object")

    known = {"model", "data", "out", "seed", "split_fraction", "params", "figures"}
    unknown = set(raw) - known
    if unknown:
        raise ValidationError(f"{path}: unknown config key(s) {sorted(unknown)}")
    if "model" not in raw:
        raise ValidationError(f"{path}: config needs a top-level \"model\" entry")

    data_path = data if data is not None else raw.get("data")
    out_path = out if out is not None else raw.get("out")
    if data_path is None:
        raise ValidationError("no data path: give it in the config or with --data")
    if out_path is None:
        raise ValidationError("no output directory: give it in the config or with --out")

    return RunConfig(
        model=raw["model"],
        data=str(data_path),
        out=str(out_path),
        seed=int(seed if seed is not None else raw.get("seed", DEFAULT_SEED)),
        split_fraction=float(raw.get("split_fraction", DEFAULT_SPLIT_FRACTION)),
        params=dict(raw.get("params", {})),
        figures=bool(raw.get("figures", True)),
    )
