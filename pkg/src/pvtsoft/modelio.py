"""Model file serialization shared by the CLI commands.

Every model saves to a single JSON object carrying its family-specific
keys at the top level plus two pipeline keys: "type" (model family) and
"scaler" (the fitted normalization ranges). Floats serialize via repr, so
a save/load round trip is bit-exact. Files without "type" are accepted
when the family is recognizable from the keys, which lets externally
produced weight tables load directly.
"""

import json
from pathlib import Path

import numpy as np

from . import anfis, ann, lssvm
from .dataset import Scaler
from .errors import DataError

FAMILY_OF = {
    "lssvm": "lssvm",
    "anfis": "anfis",
    "mlp-bp": "mlp",
    "mlp-lm": "mlp",
    "rbf-interp": "rbf",
    "rbf-centers": "rbf",
}


def save_model(family: str, model, path, scaler: Scaler | None = None) -> None:
    if family == "lssvm":
        data = lssvm.to_dict(model)
    elif family == "anfis":
        data = anfis.to_dict(model)
    elif family == "mlp":
        data = ann.mlp_to_dict(model)
    elif family == "rbf":
        data = ann.rbf_to_dict(model)
    else:
        raise DataError(f"unknown model family {family!r}")
    data["type"] = family
    if scaler is not None and "scaler" not in data:
        data["scaler"] = scaler.to_dict()
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def load_model(path):
    """Returns (family, model, scaler-or-None)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"model file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from None

    family = data.get("type") or _infer_family(data, path)
    scaler = Scaler.from_dict(data["scaler"]) if "scaler" in data else None
    try:
        if family == "lssvm":
            return family, lssvm.from_dict(data), scaler
        if family == "anfis":
            return family, anfis.from_dict(data), scaler
        if family == "mlp":
            return family, ann.mlp_from_dict(data), scaler
        if family == "rbf":
            return family, ann.rbf_from_dict(data), scaler
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path} is missing fields for a {family} model: {exc}") from None
    raise DataError(f"{path}: unknown model type {family!r}")


def _infer_family(data: dict, path) -> str:
    if "support_values" in data:
        return "lssvm"
    if "rules" in data:
        return "anfis"
    if "hidden_weights" in data:
        return "mlp"
    if "centers" in data and "weights" in data:
        return "rbf"
    raise DataError(f"{path}: cannot infer the model family from the file keys")


def predict_normalized(family: str, model, x: np.ndarray) -> np.ndarray:
    """Batch predictions in normalized units for any model family."""
    if family == "lssvm":
        return lssvm.predict(model, x)
    if family == "anfis":
        return anfis.predict(model, x)
    if family == "mlp":
        return ann.mlp_predict(model, x)
    if family == "rbf":
        return ann.rbf_predict(model, x)
    raise DataError(f"unknown model family {family!r}")
