import json

import pytest

from pvtsoft.cli import main
from pvtsoft.dataset import Dataset, generate_synthetic, save_csv


def run(*argv) -> int:
    return main(list(argv))


@pytest.fixture(scope="module")
def data_csv(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    path = root / "data.csv"
    save_csv(generate_synthetic(60, 3, 0.1), path)
    return path


@pytest.fixture(scope="module")
def lssvm_model(tmp_path_factory, data_csv):
    """A fast fixed-hyperparameter model shared across command tests."""
    root = tmp_path_factory.mktemp("model")
    cfg = root / "cfg.json"
    cfg.write_text(json.dumps({
        "model": "lssvm", "seed": 5,
        "params": {"tune": False, "gamma": 100.0, "sigma2": 2.0},
    }))
    out = root / "run"
    assert run("train", "--config", str(cfg), "--data", str(data_csv),
               "--out", str(out), "--no-figures") == 0
    return out / "model.json"


class TestGenerate:
    def test_writes_header_plus_n_lines(self, tmp_path):
        assert run("generate", "--n", "98", "--seed", "1", "--noise", "0.1", "--out", str(tmp_path)) == 0
        lines = (tmp_path / "data.csv").read_text().splitlines()
        assert len(lines) == 99

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run("generate", "--n", "20", "--seed", "9", "--noise", "0.2", "--out", str(a))
        run("generate", "--n", "20", "--seed", "9", "--noise", "0.2", "--out", str(b))
        assert (a / "data.csv").read_bytes() == (b / "data.csv").read_bytes()

    def test_negative_count_is_usage_error(self, tmp_path):
        assert run("generate", "--n", "-1", "--out", str(tmp_path)) == 1


class TestTrain:
    def test_writes_model_and_report(self, tmp_path, data_csv):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "model": "rbf-centers", "seed": 2,
            "params": {"centers": 12},
        }))
        out = tmp_path / "run"
        assert run("train", "--config", str(cfg), "--data", str(data_csv),
                   "--out", str(out), "--no-figures") == 0
        report = json.loads((out / "report.json").read_text())
        assert set(report["metrics"]) == {"train", "test", "total"}
        assert report["metrics"]["total"]["n"] == 60
        assert report["rng_algorithm"]
        assert (out / "model.json").exists()

    def test_unknown_model_is_usage_error(self, tmp_path, data_csv):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "forest"}))
        assert run("train", "--config", str(cfg), "--data", str(data_csv),
                   "--out", str(tmp_path / "x")) == 1

    def test_missing_data_file_is_io_error(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "lssvm", "params": {"tune": False}}))
        assert run("train", "--config", str(cfg), "--data", str(tmp_path / "nope.csv"),
                   "--out", str(tmp_path / "x")) == 2

    def test_repeat_runs_byte_identical(self, tmp_path, data_csv):
        # same config, same out dir: rerunning must reproduce every byte
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "model": "anfis", "seed": 11,
            "params": {"clusters": 3, "population": 8, "iterations": 5},
        }))
        out = tmp_path / "run"
        assert run("train", "--config", str(cfg), "--data", str(data_csv),
                   "--out", str(out), "--no-figures") == 0
        first = {name: (out / name).read_bytes() for name in ("model.json", "report.json", "history.csv")}
        assert run("train", "--config", str(cfg), "--data", str(data_csv),
                   "--out", str(out), "--no-figures") == 0
        for name, blob in first.items():
            assert (out / name).read_bytes() == blob

    def test_history_csv_for_tuned_models(self, tmp_path, data_csv):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "model": "lssvm", "seed": 3,
            "params": {"population": 6, "iterations": 4},
        }))
        out = tmp_path / "run"
        assert run("train", "--config", str(cfg), "--data", str(data_csv),
                   "--out", str(out), "--no-figures") == 0
        lines = (out / "history.csv").read_text().splitlines()
        assert lines[0] == "iteration,best_cost"
        assert len(lines) == 5

    @pytest.mark.parametrize("body", [
        {"model": "mlp-bp", "seed": 4, "params": {"epochs": 300, "learning_rate": 0.05}},
        {"model": "rbf-interp", "seed": 4},
        {"model": "lssvm", "seed": 4, "params": {"optimizer": "pso", "population": 6, "iterations": 4}},
        {"model": "anfis", "seed": 4, "params": {"clusters": 2, "optimizer": "ga",
                                                 "population": 6, "iterations": 4}},
    ])
    def test_every_model_name_trains(self, tmp_path, data_csv, body):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(body))
        out = tmp_path / "run"
        assert run("train", "--config", str(cfg), "--data", str(data_csv),
                   "--out", str(out), "--no-figures") == 0
        assert json.loads((out / "model.json").read_text())["type"]

    def test_numerical_failure_exit_code(self, tmp_path):
        # two identical rows make exact RBF interpolation singular
        d = generate_synthetic(10, 4, 0.05)
        values = d.values.copy()
        values[1] = values[0]
        bad = tmp_path / "dup.csv"
        save_csv(Dataset(values), bad)
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "rbf-interp", "seed": 0, "split_fraction": 0.85}))
        code = run("train", "--config", str(cfg), "--data", str(bad), "--out", str(tmp_path / "x"))
        assert code == 3


class TestPredictAndEvaluate:
    def test_predict_then_evaluate_round_trip(self, tmp_path, data_csv, lssvm_model):
        preds = tmp_path / "preds"
        assert run("predict", "--model", str(lssvm_model), "--data", str(data_csv),
                   "--out", str(preds)) == 0
        lines = (preds / "predictions.csv").read_text().splitlines()
        assert lines[0] == "record_id,electrical_efficiency"
        assert len(lines) == 61

        out = tmp_path / "eval"
        assert run("evaluate", "--pred", str(preds / "predictions.csv"),
                   "--data", str(data_csv), "--out", str(out), "--no-figures") == 0
        report = json.loads((out / "report.json").read_text())
        assert report["metrics"]["n"] == 60

    def test_evaluate_identity_predictions_r2_one(self, tmp_path, data_csv):
        import csv

        from pvtsoft.dataset import load_csv

        d = load_csv(data_csv)
        pred_file = tmp_path / "predictions.csv"
        with open(pred_file, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["record_id", "electrical_efficiency"])
            for i, v in enumerate(d.targets()):
                w.writerow([i, repr(float(v))])
        out = tmp_path / "eval"
        assert run("evaluate", "--pred", str(pred_file), "--data", str(data_csv),
                   "--out", str(out), "--no-figures") == 0
        report = json.loads((out / "report.json").read_text())
        assert report["metrics"]["r2"] == 1.0
        assert report["metrics"]["rmse"] == 0.0

    def test_predict_on_inputs_only_file(self, tmp_path, data_csv, lssvm_model):
        full = (tmp_path / "full.csv")
        full.write_text((data_csv).read_text())
        lines = full.read_text().splitlines()
        header = ",".join(lines[0].split(",")[:5])
        body = [",".join(row.split(",")[:5]) for row in lines[1:]]
        inputs_only = tmp_path / "inputs.csv"
        inputs_only.write_text("\n".join([header] + body) + "\n")
        out = tmp_path / "preds"
        assert run("predict", "--model", str(lssvm_model), "--data", str(inputs_only),
                   "--out", str(out)) == 0
        assert len((out / "predictions.csv").read_text().splitlines()) == 61

    def test_evaluate_needs_exactly_one_source(self, tmp_path, data_csv, lssvm_model):
        assert run("evaluate", "--data", str(data_csv), "--out", str(tmp_path)) == 1
        assert run("evaluate", "--model", str(lssvm_model), "--pred", "x.csv",
                   "--data", str(data_csv), "--out", str(tmp_path)) == 1

    def test_model_evaluate_matches_train_report(self, tmp_path, data_csv, lssvm_model):
        out = tmp_path / "eval"
        assert run("evaluate", "--model", str(lssvm_model), "--data", str(data_csv),
                   "--out", str(out), "--no-figures") == 0
        report = json.loads((out / "report.json").read_text())
        total = json.loads((lssvm_model.parent / "report.json").read_text())["metrics"]["total"]
        assert report["metrics"]["mse"] == pytest.approx(total["mse"], rel=1e-9)


class TestDiagnose:
    def test_injected_outlier_uniquely_flagged(self, tmp_path):
        d = generate_synthetic(98, 7, 0.1)
        values = d.values.copy()
        values[10, 5] += 10 * 0.1
        data = tmp_path / "outlier.csv"
        save_csv(Dataset(values), data)
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "model": "lssvm", "seed": 123,
            "params": {"tune": False, "gamma": 50.0, "sigma2": 2.0},
        }))
        run_dir = tmp_path / "run"
        assert run("train", "--config", str(cfg), "--data", str(data),
                   "--out", str(run_dir), "--no-figures") == 0
        diag = tmp_path / "diag"
        assert run("diagnose", "--model", str(run_dir / "model.json"), "--data", str(data),
                   "--out", str(diag), "--no-figures") == 0
        report = json.loads((diag / "report.json").read_text())
        flags = report["leverage"]["flags"]
        residual = [i for i, f in enumerate(flags)
                    if f in ("residual_outlier", "leverage_and_residual_outlier")]
        assert residual == [10]
        # the exactly proportional sun-heat column must have been collapsed
        assert report["collapsed_duplicate_columns"] == [
            {"column": "sun_heat", "duplicate_of": "solar_radiation"}
        ]
        lines = (diag / "williams.csv").read_text().splitlines()
        assert lines[0] == "h,R,flag"
        assert len(lines) == 99

    def test_diagnose_reports_both_cutoffs(self, tmp_path, data_csv, lssvm_model):
        out = tmp_path / "diag"
        assert run("diagnose", "--model", str(lssvm_model), "--data", str(data_csv),
                   "--out", str(out), "--no-figures") == 0
        report = json.loads((out / "report.json").read_text())
        assert report["leverage"]["warning_leverage"] == pytest.approx(18.0 / 60.0)
        assert report["leverage"]["reference_warning_leverage"] == 0.09


class TestSensitivity:
    def test_proportional_inputs_have_equal_relevancy(self, tmp_path, data_csv):
        out = tmp_path / "sens"
        assert run("sensitivity", "--data", str(data_csv), "--out", str(out), "--no-figures") == 0
        factors = json.loads((out / "report.json").read_text())["factors"]
        assert factors["sun_heat"] == pytest.approx(factors["solar_radiation"], abs=1e-12)
        assert set(factors) == {"inlet_temp", "flow_rate", "heat", "solar_radiation", "sun_heat"}


class TestPlotData:
    def test_three_csv_kinds(self, tmp_path, data_csv):
        out = tmp_path / "plots"
        assert run("plotdata", "--data", str(data_csv), "--out", str(out), "--no-figures") == 0
        andrews = (out / "andrews.csv").read_text().splitlines()
        assert andrews[0] == "record_id,t,f"
        assert len(andrews) == 1 + 60 * 201
        scatter = (out / "scatter.csv").read_text().splitlines()
        assert scatter[0] == "col_a,col_b,x,y"
        parallel = (out / "parallel.csv").read_text().splitlines()
        assert parallel[0] == "record_id,column,value"
        assert len(parallel) == 1 + 60 * 6

    def test_figures_rendered_by_default(self, tmp_path, data_csv):
        out = tmp_path / "plots"
        assert run("plotdata", "--data", str(data_csv), "--out", str(out)) == 0
        for name in ("andrews.png", "scatter_matrix.png", "parallel.png"):
            assert (out / name).stat().st_size > 0


class TestUsage:
    def test_unknown_command(self):
        assert run("transmogrify") == 1

    def test_config_with_unknown_keys(self, tmp_path, data_csv):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "lssvm", "optimiser": "ga"}))
        assert run("train", "--config", str(cfg), "--data", str(data_csv),
                   "--out", str(tmp_path / "x")) == 1
