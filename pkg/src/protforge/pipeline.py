"""Dataset assembly: label ingestion, IQR outlier removal, invertible
standardization, splits, regression metrics, and CSV/JSON serialization.

All floats are written with 17 significant digits so export -> import is
bit-exact and two exports of the same matrix are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DuplicateIdError, SchemaError

LABEL_COLUMNS = ("E_coul", "E_solv")


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def iqr_filter(values) -> np.ndarray:
    """Boolean keep-mask: v in [Q1 - 1.5 IQR, Q3 + 1.5 IQR], quartiles by
    linear interpolation between order statistics."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("iqr_filter expects a 1-d value list")
    if arr.size < 4:
        raise ValueError(f"IQR filtering needs >= 4 values, got {arr.size}")
    q1, q3 = np.quantile(arr, [0.25, 0.75])
    iqr = q3 - q1
    lo = q1 - 1.5 * iqr
    hi = q3 + 1.5 * iqr
    return (arr >= lo) & (arr <= hi)


@dataclass(frozen=True)
class ScalerParams:
    means: np.ndarray
    stds: np.ndarray  # population std; 0 marks a constant column

    def to_jsonable(self) -> dict:
        return {
            "means": [float(m) for m in self.means],
            "stds": [float(s) for s in self.stds],
        }

    @classmethod
    def from_jsonable(cls, doc: dict) -> "ScalerParams":
        return cls(
            means=np.asarray(doc["means"], dtype=np.float64),
            stds=np.asarray(doc["stds"], dtype=np.float64),
        )


def fit_scaler(columns) -> ScalerParams:
    """Per-column mean and population standard deviation."""
    x = np.asarray(columns, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.size == 0:
        raise ValueError("cannot fit a scaler on empty data")
    return ScalerParams(means=x.mean(axis=0), stds=x.std(axis=0))


def apply_scaler(params: ScalerParams, columns) -> np.ndarray:
    """z = (x - mean) / std; constant columns (std 0) map to 0."""
    x = np.asarray(columns, dtype=np.float64)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[:, None]
    stds = np.where(params.stds == 0, 1.0, params.stds)
    z = (x - params.means) / stds
    z[:, params.stds == 0] = 0.0
    return z[:, 0] if squeeze else z


def invert_scaler(params: ScalerParams, z) -> np.ndarray:
    """x = z * std + mean; constant columns invert to their mean."""
    zz = np.asarray(z, dtype=np.float64)
    squeeze = zz.ndim == 1
    if squeeze:
        zz = zz[:, None]
    x = zz * params.stds + params.means
    return x[:, 0] if squeeze else x


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    mape: float | None  # percent; None when some y_i is zero
    r2: float

    def to_jsonable(self) -> dict:
        return {"mse": self.mse, "mape": self.mape, "r2": self.r2}


def compute_metrics(y, yhat) -> MetricsReport:
    """MSE, MAPE (percent) and R^2.

    MAPE is undefined (None) when any actual value is zero.  R^2 of the
    constant-mean predictor is exactly 0.
    """
    ya = np.asarray(y, dtype=np.float64)
    pa = np.asarray(yhat, dtype=np.float64)
    if ya.shape != pa.shape or ya.ndim != 1:
        raise ValueError("metrics expect two equal-length 1-d arrays")
    if ya.size < 2:
        raise ValueError(f"metrics need >= 2 samples, got {ya.size}")
    residuals = ya - pa
    mse = float(np.mean(residuals**2))
    if np.any(ya == 0):
        mape = None
    else:
        mape = float(np.mean(np.abs(residuals / ya)) * 100.0)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((ya - ya.mean()) ** 2))
    if ss_tot == 0:
        r2 = 1.0 if ss_res == 0 else -math.inf
    else:
        r2 = 1.0 - ss_res / ss_tot
    return MetricsReport(mse=mse, mape=mape, r2=r2)


@dataclass(frozen=True)
class LabeledRecord:
    id: str
    electro: np.ndarray
    topo: np.ndarray
    labels: dict[str, float] = field(default_factory=dict)


@dataclass
class DatasetMatrix:
    records: list[LabeledRecord]
    manifest: dict

    def __post_init__(self):
        if self.records:
            e0 = len(self.records[0].electro)
            t0 = len(self.records[0].topo)
            for r in self.records:
                if len(r.electro) != e0 or len(r.topo) != t0:
                    raise ValueError(
                        f"record {r.id} has inconsistent feature lengths"
                    )

    @property
    def electro_matrix(self) -> np.ndarray:
        return np.array([r.electro for r in self.records], dtype=np.float64)

    @property
    def topo_matrix(self) -> np.ndarray:
        return np.array([r.topo for r in self.records], dtype=np.float64)

    def feature_matrix(self) -> np.ndarray:
        return np.hstack([self.electro_matrix, self.topo_matrix])

    def label_vector(self, name: str) -> np.ndarray:
        missing = [r.id for r in self.records if name not in r.labels]
        if missing:
            raise SchemaError(f"records missing label {name!r}: {missing[:5]}")
        return np.array([r.labels[name] for r in self.records])


def feature_column_names(n_electro: int, n_topo: int) -> list[str]:
    we = max(4, len(str(n_electro)))
    wt = max(4, len(str(n_topo)))
    return [f"e_{i + 1:0{we}d}" for i in range(n_electro)] + [
        f"t_{i + 1:0{wt}d}" for i in range(n_topo)
    ]


def export_dataset(dataset: DatasetMatrix, out_dir) -> dict[str, Path]:
    """Write features.csv (id, e_*, t_*, labels), labels.csv and
    manifest.json under out_dir; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not dataset.records:
        raise ValueError("refusing to export an empty dataset")
    n_electro = len(dataset.records[0].electro)
    n_topo = len(dataset.records[0].topo)
    header = ["id"] + feature_column_names(n_electro, n_topo) + list(LABEL_COLUMNS)

    features_path = out / "features.csv"
    with features_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in dataset.records:
            row = [r.id]
            row.extend(_fmt(v) for v in r.electro)
            row.extend(_fmt(v) for v in r.topo)
            row.extend(
                _fmt(r.labels[name]) if name in r.labels else ""
                for name in LABEL_COLUMNS
            )
            writer.writerow(row)

    labels_path = out / "labels.csv"
    with labels_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", *LABEL_COLUMNS])
        for r in dataset.records:
            writer.writerow(
                [r.id]
                + [
                    _fmt(r.labels[name]) if name in r.labels else ""
                    for name in LABEL_COLUMNS
                ]
            )

    manifest_path = out / "manifest.json"
    manifest = dict(dataset.manifest)
    manifest.setdefault("n_records", len(dataset.records))
    manifest.setdefault("n_electro", n_electro)
    manifest.setdefault("n_topo", n_topo)
    with manifest_path.open("w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return {
        "features": features_path,
        "labels": labels_path,
        "manifest": manifest_path,
    }


def import_dataset(directory) -> DatasetMatrix:
    """Read back an exported dataset; finite values round-trip bit-exactly."""
    directory = Path(directory)
    with (directory / "manifest.json").open() as fh:
        manifest = json.load(fh)
    with (directory / "features.csv").open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_electro = sum(1 for h in header if h.startswith("e_"))
        n_topo = sum(1 for h in header if h.startswith("t_"))
        records = []
        for row in reader:
            rid = row[0]
            electro = np.array(row[1 : 1 + n_electro], dtype=np.float64)
            topo = np.array(
                row[1 + n_electro : 1 + n_electro + n_topo], dtype=np.float64
            )
            labels = {}
            for offset, name in enumerate(LABEL_COLUMNS):
                cell = row[1 + n_electro + n_topo + offset]
                if cell != "":
                    labels[name] = float(cell)
            records.append(
                LabeledRecord(id=rid, electro=electro, topo=topo, labels=labels)
            )
    return DatasetMatrix(records=records, manifest=manifest)


def ingest_labels(source) -> dict[str, dict[str, float]]:
    """Parse a label CSV (header: id plus E_coul and/or E_solv) into a map
    id -> {label: value}.  Empty cells mean the label is absent."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("label CSV is empty") from None
    header = [h.strip() for h in header]
    if not header or header[0] != "id":
        raise SchemaError(f"label CSV must start with an 'id' column, got {header}")
    unknown = [h for h in header[1:] if h not in LABEL_COLUMNS]
    if unknown:
        raise SchemaError(f"unknown label column(s) {unknown}")
    if len(header) < 2:
        raise SchemaError("label CSV needs at least one energy column")
    out: dict[str, dict[str, float]] = {}
    for line_number, row in enumerate(reader, start=2):
        if not row:
            continue
        rid = row[0]
        if rid in out:
            raise DuplicateIdError(f"duplicate id {rid!r} in label CSV")
        labels = {}
        for name, cell in zip(header[1:], row[1:]):
            cell = cell.strip()
            if cell == "":
                continue
            try:
                labels[name] = float(cell)
            except ValueError:
                raise SchemaError(
                    f"line {line_number}: bad numeric cell {cell!r} for {name}"
                ) from None
        out[rid] = labels
    return out


def split_indices(n: int, test_fraction: float, seed: int):
    """Seeded shuffle split; returns (train_idx, test_idx)."""
    if not 0 < test_fraction < 1:
        raise ValueError(f"test fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_test = max(1, int(round(n * test_fraction)))
    return np.sort(order[n_test:]), np.sort(order[:n_test])


def kfold_indices(n: int, k: int, seed: int):
    """Seeded k-fold partition; yields (train_idx, test_idx) per fold."""
    if k < 2 or k > n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    folds = np.array_split(order, k)
    out = []
    for i in range(k):
        test = np.sort(folds[i])
        train = np.sort(np.concatenate([folds[j] for j in range(k) if j != i]))
        out.append((train, test))
    return out
