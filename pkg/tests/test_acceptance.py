"""Acceptance suite: one test per criterion, each printing a pass/fail line.

The end-to-end criteria run the real CLI pipeline on the synthetic
98-record dataset with the reference model configurations (metaheuristic
budgets reduced to 100 iterations where stated).
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from pvtsoft import anfis, ann, lssvm
from pvtsoft.cli import main
from pvtsoft.dataset import Dataset, generate_synthetic, save_csv
from pvtsoft.evaluation import hat_diagonal, relevancy_factor, warning_leverage
from pvtsoft.numerics import GaConfig, PsoConfig, finite_diff_gradient, ga_minimize, pso_minimize

MASTER_SEED = 123
DATA_SEED = 7
NOISE_SD = 0.1

# Benchmark error table for the four model families on the original
# 98-point collector dataset: (model, partition) -> (MSE, RMSE).
REFERENCE_ERROR_TABLE = {
    ("lssvm", "test"): (0.004, 0.061),
    ("lssvm", "train"): (0.003, 0.053),
    ("lssvm", "total"): (0.003, 0.055),
    ("anfis", "test"): (0.011, 0.107),
    ("anfis", "train"): (0.032, 0.178),
    ("anfis", "total"): (0.027, 0.164),
    ("mlp-ann", "test"): (0.007, 0.083),
    ("mlp-ann", "train"): (0.008, 0.091),
    ("mlp-ann", "total"): (0.008, 0.089),
    ("rbf-ann", "test"): (0.037, 0.193),
    ("rbf-ann", "train"): (0.015, 0.123),
    ("rbf-ann", "total"): (0.020, 0.143),
}

PIPELINE_MODELS = {
    "lssvm": {"model": "lssvm", "seed": MASTER_SEED, "params": {"iterations": 100}},
    "anfis": {"model": "anfis", "seed": MASTER_SEED, "params": {"iterations": 100}},
    "mlp-lm": {"model": "mlp-lm", "seed": MASTER_SEED},
    "rbf-centers": {"model": "rbf-centers", "seed": MASTER_SEED},
}


@contextmanager
def criterion(number: int, name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number:02d} {name}: FAIL")
        raise
    print(f"ACCEPTANCE {number:02d} {name}: PASS")


@pytest.fixture(scope="session")
def pipeline(tmp_path_factory):
    """Generate the synthetic campaign and train all four models once."""
    root = tmp_path_factory.mktemp("pipeline")
    assert main(["generate", "--n", "98", "--seed", str(DATA_SEED),
                 "--noise", str(NOISE_SD), "--out", str(root)]) == 0
    data = root / "data.csv"
    t0 = time.perf_counter()
    runs = {}
    for name, cfg in PIPELINE_MODELS.items():
        cfg_path = root / f"{name}.json"
        cfg_path.write_text(json.dumps(cfg))
        out = root / name
        code = main(["train", "--config", str(cfg_path), "--data", str(data),
                     "--out", str(out), "--no-figures"])
        assert code == 0, f"training {name} failed with exit code {code}"
        runs[name] = out
    elapsed = time.perf_counter() - t0
    return {"root": root, "data": data, "runs": runs, "train_seconds": elapsed}


def test_criterion_01_reference_table_internal_consistency():
    with criterion(1, "reference error table: sqrt(MSE) matches RMSE within 0.01"):
        t0 = time.perf_counter()
        for (model, partition), (mse, rmse) in REFERENCE_ERROR_TABLE.items():
            assert abs(math.sqrt(mse) - rmse) < 0.01, (model, partition)
        assert time.perf_counter() - t0 < 1.0


def test_criterion_02_parameter_count():
    with criterion(2, "membership parameter count (7, 6, 2) = 84"):
        assert anfis.count_parameters(7, 6, 2) == 84


def test_criterion_03_lssvm_dual_constraints():
    with criterion(3, "LSSVM zero-sum and residual identities on 50 random sets"):
        rng = np.random.default_rng(31)
        for _ in range(50):
            n = int(rng.integers(2, 61))
            d = int(rng.integers(2, 6))
            x = rng.uniform(-1, 1, size=(n, d))
            y = rng.uniform(-1, 1, size=n)
            hyper = lssvm.LssvmHyper(float(rng.uniform(0.5, 1000.0)), float(rng.uniform(0.5, 4.0)))
            m = lssvm.train(x, y, hyper)
            assert abs(float(np.sum(m.support_values))) <= 1e-8
            residuals = y - lssvm.predict(m, x)
            assert np.max(np.abs(residuals - m.support_values / hyper.gamma)) <= 1e-8


def test_criterion_04_interpolation_equivalence():
    with criterion(4, "huge-gamma LSSVM matches exact RBF interpolation within 1e-5"):
        rng = np.random.default_rng(41)
        sigma_rbf = 0.4
        for _ in range(20):
            n = int(rng.integers(3, 21))
            x = rng.uniform(-1, 1, size=(n, 3))
            y = rng.uniform(-1, 1, size=n)
            svm = lssvm.train(x, y, lssvm.LssvmHyper(1e9, 2.0 * sigma_rbf ** 2))
            net = ann.rbf_train_interpolation(x, y, sigma=sigma_rbf)
            assert np.max(np.abs(lssvm.predict(svm, x) - y)) <= 1e-5
            assert np.max(np.abs(lssvm.predict(svm, x) - ann.rbf_predict(net, x))) <= 1e-5


def test_criterion_05_mlp_gradient_against_finite_differences():
    with criterion(5, "MLP gradient vs central differences, relative 1e-5"):
        t0 = time.perf_counter()
        rng = np.random.default_rng(51)
        worst = 0.0
        for trial in range(50):
            hidden = int(rng.integers(2, 8))
            d = int(rng.integers(2, 6))
            n = int(rng.integers(2, 10))
            model = ann.mlp_init(d, hidden, seed=trial)
            x = rng.uniform(-1, 1, size=(n, d))
            y = rng.uniform(-1, 1, size=n)
            g = ann.mlp_gradient(model, x, y)
            packed = np.concatenate(
                [g.hidden_weights.ravel(), g.hidden_biases, g.output_weights, [g.output_bias]]
            )

            def cost(theta, _h=hidden, _d=d, _x=x, _y=y):
                return float(np.sum((ann.mlp_predict(ann._unpack(theta, _h, _d), _x) - _y) ** 2))

            numeric = finite_diff_gradient(cost, ann._pack(model), h=1e-6)
            scale = np.maximum(np.abs(numeric), 1.0)
            worst = max(worst, float(np.max(np.abs(packed - numeric) / scale)))
        assert worst < 1e-5
        assert time.perf_counter() - t0 < 10.0


def test_criterion_06_anfis_normalization_and_affine_reduction():
    with criterion(6, "strength normalization sums to 1; single rule is affine"):
        rng = np.random.default_rng(61)
        model = anfis.AnfisModel(
            rng.uniform(-1, 1, size=(4, 3)),
            rng.uniform(0.2, 1.5, size=(4, 3)),
            rng.normal(size=(4, 3)),
            rng.normal(size=4),
            3,
        )
        for _ in range(1000):
            x = rng.uniform(-2, 2, size=3)
            w_bar = anfis.normalize_strengths(anfis.firing_strengths(model, x))
            assert abs(float(w_bar.sum()) - 1.0) <= 1e-12

        single = anfis.AnfisModel(
            np.array([[0.3, -0.2]]), np.array([[0.7, 1.1]]),
            np.array([[1.5, -2.0]]), np.array([0.25]), 2,
        )
        for _ in range(100):
            x = rng.uniform(-2, 2, size=2)
            expected = float(single.slopes[0] @ x + single.intercepts[0])
            assert anfis.forward(single, x) == expected


def test_criterion_07_hat_matrix_laws():
    with criterion(7, "hat diagonal trace and range laws; warning leverage 18/98"):
        rng = np.random.default_rng(71)
        for _ in range(100):
            n = int(rng.integers(4, 80))
            k = int(rng.integers(1, min(n, 8)))
            x = rng.normal(size=(n, k))
            h = hat_diagonal(x)
            assert abs(float(h.sum()) - k) <= 1e-9
            assert np.all(h >= -1e-12) and np.all(h <= 1.0 + 1e-12)
        assert warning_leverage(5, 98) == 18.0 / 98.0


def test_criterion_08_relevancy_factor_laws():
    with criterion(8, "relevancy factor: exact extremes, bounds, affine invariance"):
        rng = np.random.default_rng(81)
        x = rng.uniform(1.0, 5.0, size=50)
        assert abs(relevancy_factor(x, 2.0 * x) - 1.0) <= 1e-12
        assert abs(relevancy_factor(x, -3.0 * x) + 1.0) <= 1e-12
        for _ in range(1000):
            n = int(rng.integers(3, 40))
            r = relevancy_factor(rng.normal(size=n), rng.normal(size=n))
            assert abs(r) <= 1.0 + 1e-12
        a = rng.normal(size=30)
        b = rng.normal(size=30)
        base = relevancy_factor(a, b)
        assert abs(relevancy_factor(3.0 * a + 1.0, b) - base) <= 1e-12
        assert abs(relevancy_factor(-3.0 * a + 1.0, b) + base) <= 1e-12


def test_criterion_09_end_to_end_pipeline(pipeline):
    with criterion(9, "end-to-end synthetic campaign: all four models generalize"):
        assert pipeline["train_seconds"] < 300.0
        test_r2 = {}
        for name, out in pipeline["runs"].items():
            report = json.loads((out / "report.json").read_text())
            for part in ("train", "test", "total"):
                block = report["metrics"][part]
                for key in ("mse", "rmse", "mre", "mae", "r2", "std"):
                    assert key in block, f"{name} {part} report misses {key}"
            test_r2[name] = report["metrics"]["test"]["r2"]
        print("  test R2:", {k: round(v, 4) for k, v in test_r2.items()})
        assert test_r2["lssvm"] >= 0.95
        for name, r2 in test_r2.items():
            assert r2 >= 0.80, f"{name} test R2 {r2:.3f} below 0.80"


def test_criterion_10_outlier_harness(tmp_path):
    with criterion(10, "injected 10-sigma outlier is the unique residual flag"):
        d = generate_synthetic(98, DATA_SEED, NOISE_SD)
        values = d.values.copy()
        values[10, 5] += 10.0 * NOISE_SD
        data = tmp_path / "outlier.csv"
        save_csv(Dataset(values), data)
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "model": "lssvm", "seed": MASTER_SEED,
            "params": {"tune": False, "gamma": 50.0, "sigma2": 2.0},
        }))
        run_dir = tmp_path / "run"
        assert main(["train", "--config", str(cfg), "--data", str(data),
                     "--out", str(run_dir), "--no-figures"]) == 0
        diag = tmp_path / "diag"
        assert main(["diagnose", "--model", str(run_dir / "model.json"), "--data", str(data),
                     "--out", str(diag), "--no-figures"]) == 0
        flags = json.loads((diag / "report.json").read_text())["leverage"]["flags"]
        flagged = [i for i, f in enumerate(flags)
                   if f in ("residual_outlier", "leverage_and_residual_outlier")]
        assert flagged == [10]


def test_criterion_11_pipeline_determinism(pipeline):
    with criterion(11, "same master seed reproduces model and report files byte for byte"):
        first = {}
        for name, out in pipeline["runs"].items():
            first[name] = {
                "model": (out / "model.json").read_bytes(),
                "report": (out / "report.json").read_bytes(),
            }
        for name, cfg in PIPELINE_MODELS.items():
            cfg_path = pipeline["root"] / f"{name}.json"
            out = pipeline["runs"][name]
            assert main(["train", "--config", str(cfg_path), "--data", str(pipeline["data"]),
                         "--out", str(out), "--no-figures"]) == 0
            assert (out / "model.json").read_bytes() == first[name]["model"], name
            assert (out / "report.json").read_bytes() == first[name]["report"], name


def test_criterion_12_optimizer_sanity():
    with criterion(12, "GA and PSO solve the 2-D sphere within reference budgets"):
        def sphere(v):
            return float(np.sum(v ** 2))

        ga = ga_minimize(sphere, GaConfig(population=100, iterations=1000,
                                          bounds=[(-5.0, 5.0)] * 2, seed=121))
        assert ga.cost < 1e-3
        assert len(ga.history) == 1000 and np.all(np.diff(ga.history) <= 0)

        pso = pso_minimize(sphere, PsoConfig(population=50, iterations=1000,
                                             bounds=[(-5.0, 5.0)] * 2,
                                             c1=1.0, c2=2.0, seed=122))
        assert pso.cost < 1e-3
        assert len(pso.history) == 1000 and np.all(np.diff(pso.history) <= 0)
