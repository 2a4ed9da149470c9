"""Training harness: split, fit, evaluate in physical units, report."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import (
    Dataset,
    inverse_label_transform,
    load_dataset,
    standardized_inputs,
)
from .metrics import regression_metrics
from .model import NetworkSpec, build_model

log = logging.getLogger("protforge_trainer")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 500
    learning_rate: float = 1e-4
    batch_size: int = 32
    test_fraction: float = 0.2
    folds: int = 5
    seed: int = 0
    use_topo: bool = True
    use_electro: bool = True

    def __post_init__(self):
        if self.epochs <= 0 or self.batch_size <= 0 or self.learning_rate <= 0:
            raise ValueError("hyperparameters must be positive")
        if not (self.use_topo or self.use_electro):
            raise ValueError("at least one feature branch must be enabled")


def split_indices(n: int, test_fraction: float, seed: int):
    """Seeded shuffle split, fixed membership for a fixed seed."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_test = max(1, int(round(n * test_fraction)))
    return np.sort(order[n_test:]), np.sort(order[:n_test])


def kfold_indices(n: int, k: int, seed: int):
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    folds = np.array_split(order, k)
    for i in range(k):
        test = np.sort(folds[i])
        train = np.sort(np.concatenate([folds[j] for j in range(k) if j != i]))
        yield train, test


def _model_inputs(topo, electro, config: TrainConfig):
    inputs = []
    if config.use_topo:
        inputs.append(topo)
    if config.use_electro:
        inputs.append(electro)
    return inputs if len(inputs) > 1 else inputs[0]


def _fit_and_predict(dataset: Dataset, config: TrainConfig, spec: NetworkSpec,
                     train_idx, eval_idx):
    import tensorflow as tf

    tf.keras.utils.set_random_seed(config.seed)
    topo, electro, labels = standardized_inputs(dataset)
    topo_len = dataset.n_topo if config.use_topo else 0
    electro_len = dataset.n_electro if config.use_electro else 0
    model = build_model(spec, topo_len, electro_len)
    model.compile(
        optimizer=tf.keras.optimizers.Adam(learning_rate=config.learning_rate),
        loss="mse",
    )
    x_train = _model_inputs(topo[train_idx], electro[train_idx], config)
    x_eval = _model_inputs(topo[eval_idx], electro[eval_idx], config)
    model.fit(
        x_train,
        labels[train_idx],
        epochs=config.epochs,
        batch_size=config.batch_size,
        verbose=0,
    )
    z_pred = model.predict(x_eval, verbose=0).reshape(-1)
    y_pred = inverse_label_transform(dataset, z_pred)
    y_true = dataset.labels[eval_idx]
    return model, y_true, y_pred


def train_and_evaluate(dataset_dir, config: TrainConfig,
                       spec: NetworkSpec | None = None,
                       out_dir=None) -> dict:
    """Train on the 80% split, evaluate the held-out 20% in physical units,
    write metrics.json and scatter.csv when out_dir is given."""
    spec = spec or NetworkSpec()
    dataset = load_dataset(dataset_dir)
    n = len(dataset.ids)
    train_idx, test_idx = split_indices(n, config.test_fraction, config.seed)
    if len(test_idx) < 2 or len(train_idx) < 2:
        raise ValueError(
            f"dataset of {n} rows splits into {len(train_idx)} train / "
            f"{len(test_idx)} test at test_fraction={config.test_fraction}; "
            "need >= 2 on each side"
        )
    model, y_true, y_pred = _fit_and_predict(
        dataset, config, spec, train_idx, test_idx
    )
    report = regression_metrics(y_true, y_pred)
    report.update(
        n_train=int(len(train_idx)),
        n_test=int(len(test_idx)),
        seed=config.seed,
        parameters=int(model.count_params()),
    )
    log.info(
        "test MSE %.6g, R2 %.4f (%d parameters)",
        report["mse"], report["r2"], report["parameters"],
    )
    if out_dir is not None:
        _write_report(Path(out_dir), report, y_true, y_pred)
    return report


def cross_validate(dataset_dir, config: TrainConfig,
                   spec: NetworkSpec | None = None,
                   out_dir=None) -> dict:
    """k-fold cross-validation; per-fold metrics plus their means."""
    spec = spec or NetworkSpec()
    dataset = load_dataset(dataset_dir)
    n = len(dataset.ids)
    folds = []
    for fold, (train_idx, test_idx) in enumerate(
        kfold_indices(n, config.folds, config.seed)
    ):
        _, y_true, y_pred = _fit_and_predict(
            dataset, config, spec, train_idx, test_idx
        )
        fold_report = regression_metrics(y_true, y_pred)
        fold_report["fold"] = fold
        folds.append(fold_report)
        log.info("fold %d: MSE %.6g, R2 %.4f", fold,
                 fold_report["mse"], fold_report["r2"])
    report = {
        "folds": folds,
        "mse": float(np.mean([f["mse"] for f in folds])),
        "r2": float(np.mean([f["r2"] for f in folds])),
        "seed": config.seed,
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with (out / "cv_metrics.json").open("w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return report


def _write_report(out: Path, report: dict, y_true, y_pred) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with (out / "metrics.json").open("w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    with (out / "scatter.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y", "yhat"])
        for a, b in zip(y_true, y_pred):
            writer.writerow([format(float(a), ".17g"), format(float(b), ".17g")])
