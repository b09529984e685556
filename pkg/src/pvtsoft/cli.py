"""Command-line front end.

Subcommands: generate, train, predict, evaluate, diagnose, sensitivity,
plotdata. Every command writes its outputs under --out with fixed names
(data.csv, model.json, report.json, predictions.csv, history.csv,
williams.csv, andrews.csv, scatter.csv, parallel.csv) plus rendered PNG
figures unless --no-figures is given.

Exit codes: 0 success, 1 usage or validation, 2 I/O or schema problem,
3 numerical failure. Runs are deterministic given their config; wall time
goes to stdout only so repeated runs produce byte-identical files.
"""

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, anfis, ann, lssvm, plotting
from .config import RunConfig, load_config
from .dataset import (
    INPUT_COLUMNS,
    TARGET_COLUMN,
    denormalize,
    fit_normalize,
    generate_synthetic,
    load_csv,
    save_csv,
    split,
)
from .errors import DataError, NumericsError, PvtsoftError, ValidationError
from .evaluation import (
    RelevancyReport,
    leverage_analysis,
    metrics,
    plot_data,
    relevancy_factor,
)
from .modelio import load_model, predict_normalized, save_model
from .numerics import (
    ALGORITHM_ID,
    GaConfig,
    LmConfig,
    PsoConfig,
    derive_seed,
    write_history_csv,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_SPLIT_SEED_INDEX = 0
_TRAIN_SEED_INDEX = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pvtsoft", description="PV/T collector efficiency modeling toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset CSV")
    p.add_argument("--n", type=int, required=True, help="number of records")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.1, help="efficiency noise standard deviation")
    p.add_argument("--out", required=True, help="output directory (writes data.csv)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train a model from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--data", help="override the config's data path")
    p.add_argument("--out", help="override the config's output directory")
    p.add_argument("--seed", type=int, help="override the config's seed")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict efficiency for a data file")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="error metrics for a model or prediction file")
    p.add_argument("--model")
    p.add_argument("--pred", help="predictions.csv to evaluate instead of a model")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("diagnose", help="leverage-based outlier detection")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--with-intercept", action="store_true",
                   help="add an intercept column to the leverage design matrix")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("sensitivity", help="relevancy factor of each input")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("plotdata", help="export Andrews, scatter-matrix, and parallel-coordinate data")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_plotdata)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PvtsoftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def cmd_generate(args) -> int:
    if args.n < 0:
        raise ValidationError(f"--n must be >= 0, got {args.n}")
    if args.seed < 0:
        raise ValidationError("--seed must be >= 0")
    d = generate_synthetic(args.n, args.seed, args.noise)
    out = _outdir(args.out)
    save_csv(d, out / "data.csv")
    print(f"wrote {d.n} records to {out / 'data.csv'}")
    return EXIT_OK


def _train_model(cfg: RunConfig, x: np.ndarray, y: np.ndarray, scaler):
    """Dispatch on the config's model name.

    Returns (family, model, history-or-None, info dict for the report).
    """
    p = cfg.params
    seed = derive_seed(cfg.seed, _TRAIN_SEED_INDEX)
    placeholder = [(0.0, 1.0)]

    if cfg.model == "lssvm":
        if p["tune"]:
            opt = _optimizer_config(p, seed, placeholder)
            res = lssvm.tune(
                x, y, opt,
                gamma_bounds=tuple(p["gamma_bounds"]),
                sigma2_bounds=tuple(p["sigma2_bounds"]),
                scaler=scaler,
            )
            info = {"tuned": True, "optimizer": p["optimizer"],
                    "gamma": res.hyper.gamma, "sigma2": res.hyper.sigma2}
            return "lssvm", res.model, res.history, info
        model = lssvm.train(x, y, lssvm.LssvmHyper(p["gamma"], p["sigma2"]), scaler)
        return "lssvm", model, None, {"tuned": False, "gamma": p["gamma"], "sigma2": p["sigma2"]}

    if cfg.model == "anfis":
        opt = _optimizer_config(p, seed, placeholder)
        model, history = anfis.train(x, y, p["clusters"], opt, consequent_ridge=p["consequent_ridge"])
        info = {
            "clusters": p["clusters"],
            "optimizer": p["optimizer"],
            "consequent_ridge": p["consequent_ridge"],
            # the reference configuration counts 6 variables while the schema
            # has 5 inputs; report both readings instead of reconciling them
            "membership_parameters_5_variables": anfis.count_parameters(p["clusters"], 5, 2),
            "membership_parameters_6_variables": anfis.count_parameters(p["clusters"], 6, 2),
            "ridge_fallback": model.ridge_fallback,
        }
        return "anfis", model, history, info

    if cfg.model == "mlp-bp":
        x_fit, y_fit, val = _early_stop_split(x, y, seed) if p["early_stopping"] else (x, y, None)
        model, history = ann.mlp_train_bp(
            x_fit, y_fit, p["learning_rate"], p["epochs"], seed, p["hidden"], validation=val
        )
        return "mlp", model, history, {"hidden": p["hidden"], "learning_rate": p["learning_rate"],
                                       "epochs": p["epochs"], "early_stopping": p["early_stopping"]}

    if cfg.model == "mlp-lm":
        x_fit, y_fit, val = _early_stop_split(x, y, seed) if p["early_stopping"] else (x, y, None)
        model, history = ann.mlp_train_lm(
            x_fit, y_fit, LmConfig(max_iterations=p["max_iterations"]), seed, p["hidden"], validation=val
        )
        return "mlp", model, history, {"hidden": p["hidden"], "max_iterations": p["max_iterations"],
                                       "early_stopping": p["early_stopping"]}

    if cfg.model == "rbf-interp":
        sigma = p["sigma"] if p["sigma"] is not None else ann.default_sigma(x)
        model = ann.rbf_train_interpolation(x, y, sigma)
        return "rbf", model, None, {"sigma": model.sigma, "centers": x.shape[0]}

    if cfg.model == "rbf-centers":
        model = ann.rbf_train_centers(
            x, y, p["centers"], p["sigma"], seed, refine_sigma=p["refine_sigma"]
        )
        return "rbf", model, None, {"sigma": model.sigma, "centers": p["centers"],
                                    "ridge_fallback": model.ridge_fallback}

    raise ValidationError(f"unknown model {cfg.model!r}")


_EARLY_STOP_STREAM = 57
_EARLY_STOP_FRACTION = 0.8


def _early_stop_split(x, y, seed):
    """Inner 80/20 cut of the training rows for early-stopping selection."""
    from .numerics import stream

    n = x.shape[0]
    if n < 5:
        return x, y, None
    perm = stream(seed, _EARLY_STOP_STREAM).permutation(n)
    cut = int(np.floor(n * _EARLY_STOP_FRACTION + 0.5))
    fit, val = perm[:cut], perm[cut:]
    return x[fit], y[fit], (x[val], y[val])


def _optimizer_config(p: dict, seed: int, bounds):
    name = p.get("optimizer", "ga")
    if name == "ga":
        return GaConfig(
            population=p["population"], iterations=p["iterations"], bounds=bounds,
            crossover_rate=p.get("crossover_rate", 0.9),
            mutation_rate=p.get("mutation_rate", 0.1),
            mutation_sd=p.get("mutation_sd"),
            seed=seed,
        )
    if name == "pso":
        return PsoConfig(
            population=p["population"], iterations=p["iterations"], bounds=bounds,
            c1=p.get("c1", 1.0), c2=p.get("c2", 2.0), inertia=p.get("inertia", 0.729), seed=seed,
        )
    raise ValidationError(f"unknown optimizer {name!r}; expected \"ga\" or \"pso\"")


def cmd_train(args) -> int:
    cfg = load_config(args.config, data=args.data, out=args.out, seed=args.seed)
    if args.no_figures:
        cfg.figures = False
    t0 = time.perf_counter()
    out = _outdir(cfg.out)

    data = load_csv(cfg.data)
    if not data.has_target:
        raise DataError(f"{cfg.data}: training data must include the {TARGET_COLUMN} column")
    parts = split(data, cfg.split_fraction, derive_seed(cfg.seed, _SPLIT_SEED_INDEX))
    norm_train, scaler = fit_normalize(parts.train)
    norm_test = scaler.transform(parts.test)

    family, model, history, info = _train_model(cfg, norm_train.inputs(), norm_train.targets(), scaler)

    partition_data = {}
    reports = {}
    for label, norm_d, raw_d in (("train", norm_train, parts.train), ("test", norm_test, parts.test)):
        y_cal = denormalize(predict_normalized(family, model, norm_d.inputs()), scaler, TARGET_COLUMN)
        partition_data[label] = (raw_d.targets(), y_cal)
        reports[label] = metrics(raw_d.targets(), y_cal, label)
    y_exp_all = np.concatenate([partition_data["train"][0], partition_data["test"][0]])
    y_cal_all = np.concatenate([partition_data["train"][1], partition_data["test"][1]])
    reports["total"] = metrics(y_exp_all, y_cal_all, "total")

    save_model(family, model, out / "model.json", scaler)
    if history is not None:
        write_history_csv(history, out / "history.csv")

    report = {
        "config": cfg.resolved(),
        "model_file": "model.json",
        "model_info": info,
        "partition_sizes": {"train": parts.train.n, "test": parts.test.n},
        "metrics": {name: reports[name].to_dict() for name in ("train", "test", "total")},
        "library_version": __version__,
        "rng_algorithm": ALGORITHM_ID,
    }
    _write_json(report, out / "report.json")

    if cfg.figures:
        plotting.save_parity(partition_data, out / "parity.png")
        if history is not None:
            plotting.save_history(history, out / "history.png")

    for name in ("train", "test", "total"):
        m = reports[name]
        r2 = "n/a" if m.r2 is None else f"{m.r2:.4f}"
        print(f"{cfg.model} {name}: n={m.n} rmse={m.rmse:.4f} r2={r2}")
    print(f"wall time: {time.perf_counter() - t0:.2f} s")
    return EXIT_OK


def _load_model_with_scaler(path):
    family, model, scaler = load_model(path)
    if scaler is None:
        raise DataError(
            f"{path} has no scaler block; train through the pipeline or add one to use this command"
        )
    return family, model, scaler


def _predictions(family, model, scaler, data) -> np.ndarray:
    x_norm = scaler.transform(data).inputs()
    return np.asarray(denormalize(predict_normalized(family, model, x_norm), scaler, TARGET_COLUMN))


def cmd_predict(args) -> int:
    family, model, scaler = _load_model_with_scaler(args.model)
    data = load_csv(args.data)
    y_cal = _predictions(family, model, scaler, data)
    out = _outdir(args.out)
    with open(out / "predictions.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["record_id", TARGET_COLUMN])
        for i, v in enumerate(y_cal):
            writer.writerow([i, repr(float(v))])
    print(f"wrote {len(y_cal)} predictions to {out / 'predictions.csv'}")
    return EXIT_OK


def _read_predictions(path, expected_n: int) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["record_id", TARGET_COLUMN]:
            raise DataError(f"{path}: expected header record_id,{TARGET_COLUMN}")
        values = [float(row[1]) for row in reader]
    if len(values) != expected_n:
        raise DataError(f"{path}: {len(values)} predictions for {expected_n} data rows")
    return np.asarray(values)


def cmd_evaluate(args) -> int:
    if (args.model is None) == (args.pred is None):
        raise ValidationError("evaluate needs exactly one of --model or --pred")
    data = load_csv(args.data)
    if not data.has_target:
        raise DataError(f"{args.data}: evaluation data must include the {TARGET_COLUMN} column")
    if args.model:
        family, model, scaler = _load_model_with_scaler(args.model)
        y_cal = _predictions(family, model, scaler, data)
        source = {"model": str(args.model)}
    else:
        y_cal = _read_predictions(args.pred, data.n)
        source = {"predictions": str(args.pred)}

    report = metrics(data.targets(), y_cal, "total")
    out = _outdir(args.out)
    _write_json({"source": source, "data": str(args.data), "metrics": report.to_dict()}, out / "report.json")
    if not args.no_figures:
        plotting.save_parity({"data": (data.targets(), y_cal)}, out / "parity.png")
    r2 = "n/a" if report.r2 is None else f"{report.r2:.4f}"
    print(f"n={report.n} rmse={report.rmse:.4f} r2={r2}")
    return EXIT_OK


_DUPLICATE_COLUMN_ATOL = 1e-9


def _collapse_duplicate_columns(design: np.ndarray, names: list[str]):
    """Drop columns that duplicate an earlier one (within float noise), so
    the leverage projection exists when inputs are exactly proportional
    (e.g. sun heat = aperture area x irradiance). Returns the reduced
    design and the dropped (name, duplicate_of) pairs."""
    keep, dropped = [], []
    for j in range(design.shape[1]):
        dup_of = None
        for i in keep:
            if np.allclose(design[:, j], design[:, i], rtol=0.0, atol=_DUPLICATE_COLUMN_ATOL):
                dup_of = names[i]
                break
        if dup_of is None:
            keep.append(j)
        else:
            dropped.append((names[j], dup_of))
    return design[:, keep], dropped


def cmd_diagnose(args) -> int:
    family, model, scaler = _load_model_with_scaler(args.model)
    data = load_csv(args.data)
    if not data.has_target:
        raise DataError(f"{args.data}: diagnosis needs the {TARGET_COLUMN} column")
    y_cal = _predictions(family, model, scaler, data)
    design = scaler.transform(data).inputs()
    names = list(INPUT_COLUMNS)
    if args.with_intercept:
        design = np.column_stack([np.ones(data.n), design])
        names = ["intercept"] + names
    design_used, dropped = _collapse_duplicate_columns(design, names)
    # k for the cutoff and studentization stays the declared input count
    report = leverage_analysis(design_used, data.targets(), y_cal, k=len(INPUT_COLUMNS))

    out = _outdir(args.out)
    with open(out / "williams.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h", "R", "flag"])
        for h, r, flag in zip(report.hat_diagonal, report.standardized_residuals, report.flags):
            writer.writerow([repr(float(h)), repr(float(r)), flag])
    _write_json(
        {"model": str(args.model), "data": str(args.data), "k": len(INPUT_COLUMNS),
         "design_columns": [n for n in names if n not in {d for d, _ in dropped}],
         "collapsed_duplicate_columns": [{"column": d, "duplicate_of": of} for d, of in dropped],
         "leverage": report.to_dict()},
        out / "report.json",
    )
    if not args.no_figures:
        plotting.save_williams(report, out / "williams.png")
    print(f"{report.outlier_count()} of {data.n} points flagged outside the valid region "
          f"(warning leverage {report.warning_leverage:.4f})")
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    data = load_csv(args.data)
    if not data.has_target:
        raise DataError(f"{args.data}: sensitivity needs the {TARGET_COLUMN} column")
    factors = {name: relevancy_factor(data.column(name), data.targets()) for name in INPUT_COLUMNS}
    report = RelevancyReport(factors)
    out = _outdir(args.out)
    _write_json({"data": str(args.data), **report.to_dict()}, out / "report.json")
    if not args.no_figures:
        plotting.save_relevancy(factors, out / "relevancy.png")
    for name, value in report.ranked():
        print(f"{name}: {value:+.4f}")
    return EXIT_OK


def cmd_plotdata(args) -> int:
    data = load_csv(args.data)
    normalized, _ = fit_normalize(data)
    out = _outdir(args.out)

    andrews = plot_data(normalized, "andrews")
    andrews.write_csv(out / "andrews.csv")
    scatter = plot_data(data, "scatter_matrix")
    scatter.write_csv(out / "scatter.csv")
    parallel = plot_data(normalized, "parallel_coords")
    parallel.write_csv(out / "parallel.csv")

    if not args.no_figures:
        plotting.save_andrews(andrews, out / "andrews.png")
        plotting.save_scatter_matrix(data, out / "scatter_matrix.png")
        plotting.save_parallel(parallel, out / "parallel.png")
    print(f"wrote andrews.csv, scatter.csv, parallel.csv to {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
