import csv
import json
from pathlib import Path

import numpy as np
import pytest

N_CHANNELS = 12


def write_synthetic_dataset(
    out_dir,
    n=200,
    n_electro=24,
    n_bins=25,
    seed=7,
    noise=0.005,
    feature_noise=0.02,
    label="E_coul",
):
    """Synthetic dataset in the featurizer's export format with a known
    linear target y = w . features + eps.

    The features ride on two shared latent factors (plus small independent
    noise), mimicking the strong cross-column redundancy of real moment
    and barcode features; the target is an exact fixed linear functional
    of the feature columns."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    n_topo = N_CHANNELS * n_bins

    latents = rng.normal(0.0, 1.0, size=(n, 2))
    electro_loadings = rng.normal(0.0, 1.0, size=(2, n_electro))
    electro = latents @ electro_loadings + feature_noise * rng.normal(
        0.0, 1.0, size=(n, n_electro)
    )
    centers = rng.uniform(0.2, 0.8, size=N_CHANNELS)
    grid = np.linspace(0.0, 1.0, n_bins)
    templates = np.stack(
        [np.exp(-0.5 * ((grid - c) / 0.25) ** 2) for c in centers]
    )
    channel_latents = latents @ rng.normal(0.0, 1.0, size=(2, N_CHANNELS))
    topo = np.einsum("nc,cb->ncb", channel_latents, templates)
    topo += feature_noise * rng.normal(0.0, 1.0, size=topo.shape)
    topo = topo.reshape(n, n_topo)

    features = np.hstack([electro, topo])
    w = np.concatenate(
        [
            rng.normal(0.0, 1.0, size=n_electro) / np.sqrt(n_electro),
            rng.normal(0.0, 0.5, size=n_topo) / np.sqrt(n_topo),
        ]
    )
    y_clean = features @ w
    y = y_clean + rng.normal(0.0, noise * y_clean.std(), size=n)
    manifest = {
        "label": label,
        "n_electro": n_electro,
        "n_topo": n_topo,
        "n_records": n,
        "seed": seed,
        "feature_scaler": {
            "means": features.mean(axis=0).tolist(),
            "stds": features.std(axis=0).tolist(),
        },
        "label_scaler": {"means": [float(y.mean())], "stds": [float(y.std())]},
    }
    with (out / "manifest.json").open("w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    we_width = max(4, len(str(n_electro)))
    wt_width = max(4, len(str(n_topo)))
    header = (
        ["id"]
        + [f"e_{i + 1:0{we_width}d}" for i in range(n_electro)]
        + [f"t_{i + 1:0{wt_width}d}" for i in range(n_topo)]
        + ["E_coul", "E_solv"]
    )
    with (out / "features.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(n):
            row = [f"s{i:04d}"]
            row.extend(format(v, ".17g") for v in features[i])
            row.append(format(y[i], ".17g") if label == "E_coul" else "")
            row.append(format(y[i], ".17g") if label == "E_solv" else "")
            writer.writerow(row)
    return out


@pytest.fixture(scope="session")
def synthetic_dataset(tmp_path_factory):
    return write_synthetic_dataset(tmp_path_factory.mktemp("synth") / "ds")


@pytest.fixture(scope="session")
def tiny_dataset(tmp_path_factory):
    return write_synthetic_dataset(
        tmp_path_factory.mktemp("tiny") / "ds", n=16, n_electro=6, n_bins=25,
        seed=3,
    )
