"""Load a protforge dataset export (features.csv + manifest.json).

The trainer talks to the featurizer only through these files: rows are
id, e_* electrostatic columns, t_* topological columns and label columns;
the manifest carries the scaler parameters fitted at export time.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

N_CHANNELS = 12


class DatasetError(Exception):
    pass


@dataclass
class Dataset:
    ids: list[str]
    electro: np.ndarray  # (n, n_electro) raw values
    topo: np.ndarray  # (n, n_topo) raw values
    labels: np.ndarray  # (n,) raw values of manifest["label"]
    manifest: dict

    @property
    def n_electro(self) -> int:
        return self.electro.shape[1]

    @property
    def n_topo(self) -> int:
        return self.topo.shape[1]

    @property
    def n_bins(self) -> int:
        return self.n_topo // N_CHANNELS


def load_dataset(directory, label: str | None = None) -> Dataset:
    directory = Path(directory)
    with (directory / "manifest.json").open() as fh:
        manifest = json.load(fh)
    label = label or manifest.get("label") or "E_coul"

    ids: list[str] = []
    electro_rows: list[list[float]] = []
    topo_rows: list[list[float]] = []
    label_values: list[float] = []
    with (directory / "features.csv").open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        e_cols = [i for i, h in enumerate(header) if h.startswith("e_")]
        t_cols = [i for i, h in enumerate(header) if h.startswith("t_")]
        try:
            label_col = header.index(label)
        except ValueError:
            raise DatasetError(f"label column {label!r} missing from features.csv")
        for row in reader:
            cell = row[label_col]
            if cell == "":
                raise DatasetError(f"row {row[0]!r} lacks the label {label!r}")
            ids.append(row[0])
            electro_rows.append([float(row[i]) for i in e_cols])
            topo_rows.append([float(row[i]) for i in t_cols])
            label_values.append(float(cell))

    if not ids:
        raise DatasetError(f"no rows in {directory / 'features.csv'}")
    dataset = Dataset(
        ids=ids,
        electro=np.array(electro_rows),
        topo=np.array(topo_rows),
        labels=np.array(label_values),
        manifest=manifest,
    )
    validate_against_manifest(dataset)
    return dataset


def validate_against_manifest(dataset: Dataset) -> None:
    manifest = dataset.manifest
    if dataset.n_topo % N_CHANNELS != 0:
        raise DatasetError(
            f"topo length {dataset.n_topo} is not divisible into "
            f"{N_CHANNELS} channels"
        )
    expected_e = manifest.get("n_electro", manifest.get("feature_count_electro"))
    if expected_e is not None and expected_e != dataset.n_electro:
        raise DatasetError(
            f"manifest says {expected_e} electrostatic columns, "
            f"file has {dataset.n_electro}"
        )
    expected_t = manifest.get("n_topo", manifest.get("feature_count_topo"))
    if expected_t is not None and expected_t != dataset.n_topo:
        raise DatasetError(
            f"manifest says {expected_t} topological columns, "
            f"file has {dataset.n_topo}"
        )
    scaler = manifest.get("feature_scaler")
    if scaler is not None:
        width = len(scaler["means"])
        total = dataset.n_electro + dataset.n_topo
        if width != total:
            raise DatasetError(
                f"feature scaler covers {width} columns, dataset has {total}"
            )


def _scale(values: np.ndarray, means, stds) -> np.ndarray:
    means = np.asarray(means, dtype=np.float64)
    stds = np.asarray(stds, dtype=np.float64)
    safe = np.where(stds == 0, 1.0, stds)
    z = (values - means) / safe
    z[..., stds == 0] = 0.0
    return z


def standardized_inputs(dataset: Dataset):
    """(topo_3d, electro_2d, labels_1d) standardized with the manifest
    scalers; topo reshaped to (n, n_bins, 12) for the convolution branch."""
    scaler = dataset.manifest.get("feature_scaler")
    if scaler is None:
        raise DatasetError("manifest lacks feature_scaler")
    label_scaler = dataset.manifest.get("label_scaler")
    if label_scaler is None:
        raise DatasetError("manifest lacks label_scaler")
    n_e = dataset.n_electro
    electro = _scale(dataset.electro, scaler["means"][:n_e], scaler["stds"][:n_e])
    topo = _scale(dataset.topo, scaler["means"][n_e:], scaler["stds"][n_e:])
    labels = _scale(
        dataset.labels, label_scaler["means"][0], label_scaler["stds"][0]
    )
    n = len(dataset.ids)
    # flat layout is channel-major: channel c occupies bins [c*n, (c+1)*n)
    topo_3d = topo.reshape(n, N_CHANNELS, dataset.n_bins).transpose(0, 2, 1)
    return topo_3d, electro, labels


def inverse_label_transform(dataset: Dataset, z: np.ndarray) -> np.ndarray:
    """Back to physical units: z * label_std + label_mean."""
    label_scaler = dataset.manifest["label_scaler"]
    return z * label_scaler["stds"][0] + label_scaler["means"][0]
