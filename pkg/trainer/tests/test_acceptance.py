"""Trainer acceptance: required layer widths, held-out R^2 on a known
linear target, and metric agreement with the featurizer pipeline."""

import time

import numpy as np

from protforge_trainer.metrics import regression_metrics
from protforge_trainer.model import NetworkSpec, build_model
from protforge_trainer.train import TrainConfig, train_and_evaluate

from protforge.pipeline import compute_metrics


def test_acceptance_trainer(synthetic_dataset, tmp_path):
    t0 = time.time()

    # exact required widths
    model = build_model(NetworkSpec(), topo_len=1200, electro_len=90)
    conv = [l for l in model.layers if l.__class__.__name__ == "Conv1D"]
    assert [l.filters for l in conv] == [128, 64, 64]
    dense = [l for l in model.layers if l.__class__.__name__ == "Dense"]
    assert [l.units for l in dense] == [128, 64, 64, 32, 16, 8, 1]

    # 200-sample synthetic linear target: held-out R^2 > 0.95 within
    # 500 epochs at lr 1e-4, batch 32
    config = TrainConfig(epochs=500, learning_rate=1e-4, batch_size=32, seed=0)
    report = train_and_evaluate(synthetic_dataset, config, out_dir=tmp_path)
    assert report["n_train"] == 160 and report["n_test"] == 40
    assert report["r2"] > 0.95, report

    # metric agreement with the featurizer pipeline to 1e-10
    scatter = np.loadtxt(tmp_path / "scatter.csv", delimiter=",", skiprows=1)
    y, yhat = scatter[:, 0], scatter[:, 1]
    ours = regression_metrics(y, yhat)
    reference = compute_metrics(y, yhat)
    assert abs(ours["mse"] - reference.mse) <= 1e-10
    assert abs(ours["r2"] - reference.r2) <= 1e-10

    elapsed = time.time() - t0
    assert elapsed < 600, f"took {elapsed:.0f}s, budget 600s"
    print(f"PASS trainer acceptance (R2={report['r2']:.4f}, {elapsed:.0f}s < 600s)")
