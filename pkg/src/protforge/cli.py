"""Command-line front end.

Subcommands: featurize, coulomb, barcode, gb, dataset, metrics.
Exit codes: 0 success, 1 usage/config, 2 input parse, 3 capacity,
4 partial failure.  FORGE_THREADS caps the worker pool.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .electro import ORDERING_VERSION, extract_features, feature_count
from .errors import CapacityError, ProtforgeError, SchemaError
from .gb import GBContext, born_self_energies, gb_solvation_energy
from .octree import (
    DEFAULT_MIN_CLUSTER_ATOMS,
    KCAL_PER_MOL,
    build_tree,
    coulomb_energy_direct,
    coulomb_energy_treecode,
)
from .pipeline import (
    DatasetMatrix,
    LabeledRecord,
    compute_metrics,
    export_dataset,
    fit_scaler,
    import_dataset,
    ingest_labels,
    iqr_filter,
)
from .rips import DEFAULT_SIMPLEX_CAP, barcode_for_selection, barcodes_to_json
from .structure import AtomSelector, parse_pqr
from .topo import channel_names, topo_features

log = logging.getLogger("protforge")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_CAPACITY = 3
EXIT_PARTIAL = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage problems; exit 2 is reserved here for
    # input parse errors, so usage problems must surface as exit 1
    def error(self, message):
        raise UsageError(message)


def _unit_constant(units: str) -> float:
    return KCAL_PER_MOL if units == "kcal" else 1.0


def _max_workers(requested: int) -> int:
    cap = os.environ.get("FORGE_THREADS")
    if cap:
        try:
            requested = min(requested, max(1, int(cap)))
        except ValueError:
            raise UsageError(f"FORGE_THREADS must be an integer, got {cap!r}")
    return max(1, requested)


def _collect_inputs(paths: list[str]) -> list[Path]:
    files: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            files.extend(sorted(p.glob("*.pqr")))
        elif p.exists():
            files.append(p)
        else:
            raise FileNotFoundError(f"input {p} does not exist")
    if not files:
        raise FileNotFoundError(f"no PQR files found under {paths}")
    return files


def _read_structure(path: Path):
    return parse_pqr(path.read_text(), source_path=str(path), structure_id=path.stem)


# ---------------------------------------------------------------------------
# featurize


def _featurize_one(task):
    path, p, L, L_scale, n_bins, max_dim, simplex_cap = task
    path = Path(path)
    try:
        structure = _read_structure(path)
        tree = build_tree(list(structure.atoms), L, p)
        electro = extract_features(tree)
        topo = topo_features(structure, L_scale, n_bins, max_dim, simplex_cap)
        return (path.stem, electro.values, topo.flat.astype(np.float64), None)
    except (ProtforgeError, OSError) as exc:
        return (path.stem, None, None, f"{type(exc).__name__}: {exc}")


def _run_batch(tasks, worker, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(worker, tasks))
    return [worker(t) for t in tasks]


def cmd_featurize(args) -> int:
    files = _collect_inputs(args.inputs)
    workers = _max_workers(args.workers)
    tasks = [
        (str(f), args.p, args.L, args.l_scale, args.n_bins, args.max_dim,
         args.simplex_cap)
        for f in files
    ]
    results = _run_batch(tasks, _featurize_one, workers)

    records = []
    failures = []
    for stem, electro, topo, err in results:
        if err is not None:
            failures.append((stem, err))
            log.error("featurize failed for %s: %s", stem, err)
        else:
            records.append(
                LabeledRecord(id=stem, electro=electro, topo=topo, labels={})
            )
    if not records:
        log.error("no structure was featurized successfully")
        return EXIT_CAPACITY if all(
            "CapacityError" in err for _, err in failures
        ) else EXIT_PARSE

    manifest = {
        "tool": f"protforge {__version__}",
        "command": "featurize",
        "p": args.p,
        "L": args.L,
        "theta": args.theta,
        "L_scale": args.l_scale,
        "n_bins": args.n_bins,
        "max_dim": args.max_dim,
        "simplex_cap": args.simplex_cap,
        "eps1": args.eps1,
        "unit_constant": _unit_constant(args.units),
        "seed": args.seed,
        "ordering_version": ORDERING_VERSION,
        "channel_order": channel_names(),
        "feature_count_electro": feature_count(args.p, args.L),
        "feature_count_topo": 12 * args.n_bins,
        "ids": [r.id for r in records],
        "failures": [f"{stem}: {err}" for stem, err in failures],
    }
    dataset = DatasetMatrix(records=records, manifest=manifest)
    paths = export_dataset(dataset, args.out_dir)
    log.info("wrote %s", paths["features"])
    return EXIT_PARTIAL if failures else EXIT_OK


# ---------------------------------------------------------------------------
# coulomb


def _coulomb_one(task):
    path, eps1, p, L, theta, unit_constant, check = task
    path = Path(path)
    try:
        structure = _read_structure(path)
        atoms = list(structure.atoms)
        e_tc = coulomb_energy_treecode(
            atoms, eps1, p, L, theta, unit_constant=unit_constant
        )
        row = {"id": path.stem, "E_coul": e_tc}
        if check:
            e_direct = coulomb_energy_direct(atoms, eps1, unit_constant=unit_constant)
            row["E_direct"] = e_direct
            row["rel_error"] = (
                abs(e_tc - e_direct) / abs(e_direct)
                if e_direct != 0
                else abs(e_tc - e_direct)
            )
        return (path.stem, row, None)
    except (ProtforgeError, OSError) as exc:
        return (path.stem, None, f"{type(exc).__name__}: {exc}")


def cmd_coulomb(args) -> int:
    files = _collect_inputs(args.inputs)
    workers = _max_workers(args.workers)
    unit_constant = _unit_constant(args.units)
    tasks = [
        (str(f), args.eps1, args.p, args.L, args.theta, unit_constant, args.check)
        for f in files
    ]
    results = _run_batch(tasks, _coulomb_one, workers)

    rows = []
    failures = []
    for stem, row, err in results:
        if err is not None:
            failures.append((stem, err))
            log.error("coulomb failed for %s: %s", stem, err)
        else:
            rows.append(row)
    if not rows:
        log.error("no structure was processed successfully")
        return EXIT_PARSE

    header = ["id", "E_coul"] + (["E_direct", "rel_error"] if args.check else [])
    out = Path(args.out) if args.out else None
    sink = out.open("w", newline="") if out else sys.stdout
    try:
        writer = csv.writer(sink)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [row["id"]] + [format(row[h], ".17g") for h in header[1:]]
            )
    finally:
        if out:
            sink.close()
    return EXIT_PARTIAL if failures else EXIT_OK


# ---------------------------------------------------------------------------
# barcode


def cmd_barcode(args) -> int:
    files = _collect_inputs(args.inputs)
    if len(files) != 1:
        raise UsageError("barcode takes exactly one input file")
    structure = _read_structure(files[0])
    selector = AtomSelector(args.selector)
    barcodes = barcode_for_selection(
        structure, selector, args.max_scale, args.max_dim, args.simplex_cap
    )
    text = barcodes_to_json(barcodes)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.segments:
        with Path(args.segments).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["dim", "birth", "death"])
            for bc in barcodes:
                for b, d in bc.bars:
                    writer.writerow(
                        [bc.dim, format(b, ".17g"),
                         "" if d == float("inf") else format(d, ".17g")]
                    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# gb


def cmd_gb(args) -> int:
    files = _collect_inputs(args.inputs)
    if len(files) != 1:
        raise UsageError("gb takes exactly one input file")
    structure = _read_structure(files[0])
    values = []
    for token in Path(args.radii).read_text().split():
        try:
            values.append(float(token))
        except ValueError:
            raise SchemaError(f"bad radius value {token!r} in {args.radii}") from None
    radii = np.array(values, dtype=np.float64)
    ctx = GBContext(
        eps1=args.eps1,
        eps2=args.eps2,
        born_radii=radii,
        unit_constant=_unit_constant(args.units),
    )
    atoms = list(structure.atoms)
    total = gb_solvation_energy(atoms, ctx)
    born_terms = born_self_energies(atoms, ctx)
    report = {
        "id": structure.id,
        "E_solv_gb": total,
        "born_terms": [float(v) for v in born_terms],
        "eps1": args.eps1,
        "eps2": args.eps2,
        "unit_constant": ctx.unit_constant,
    }
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# dataset


def cmd_dataset(args) -> int:
    dataset = import_dataset(args.features_dir)
    labels = ingest_labels(Path(args.labels).read_text())

    matched = []
    for record in dataset.records:
        if record.id in labels:
            matched.append(
                LabeledRecord(
                    id=record.id,
                    electro=record.electro,
                    topo=record.topo,
                    labels=labels[record.id],
                )
            )
    if not matched:
        log.error("no feature row matched a label row")
        return EXIT_PARSE

    manifest = dict(dataset.manifest)
    manifest["command"] = "dataset"
    manifest["label"] = args.label
    manifest["seed"] = args.seed

    if args.iqr:
        keyed = [r for r in matched if "E_coul" in r.labels]
        if len(keyed) != len(matched):
            log.error("IQR filtering keys on E_coul but some records lack it")
            return EXIT_PARSE
        mask = iqr_filter([r.labels["E_coul"] for r in matched])
        kept = [r for r, keep in zip(matched, mask) if keep]
        manifest["iqr_removed"] = [
            r.id for r, keep in zip(matched, mask) if not keep
        ]
        matched = kept

    for r in matched:
        if args.label not in r.labels:
            log.error("record %s lacks the label %s", r.id, args.label)
            return EXIT_PARSE

    features = np.array(
        [np.concatenate([r.electro, r.topo]) for r in matched]
    )
    label_values = np.array([r.labels[args.label] for r in matched])
    feature_scaler = fit_scaler(features)
    label_scaler = fit_scaler(label_values)
    manifest["feature_scaler"] = feature_scaler.to_jsonable()
    manifest["label_scaler"] = label_scaler.to_jsonable()
    manifest["ids"] = [r.id for r in matched]
    manifest["n_records"] = len(matched)

    out = export_dataset(DatasetMatrix(records=matched, manifest=manifest),
                         args.out_dir)
    log.info("wrote %s", out["features"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# metrics


def cmd_metrics(args) -> int:
    with Path(args.pred).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["y", "yhat"]:
            raise SchemaError(f"prediction CSV must have header y,yhat, got {header}")
        y, yhat = [], []
        for line_number, row in enumerate(reader, start=2):
            try:
                y.append(float(row[0]))
                yhat.append(float(row[1]))
            except (ValueError, IndexError):
                raise SchemaError(
                    f"line {line_number}: bad y,yhat row {row!r}"
                ) from None
    report = compute_metrics(y, yhat)
    text = json.dumps(report.to_jsonable(), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_common_featurize_flags(sub):
    sub.add_argument("-p", type=int, default=2, help="Taylor expansion order")
    sub.add_argument("-L", type=int, default=1, help="octree depth")
    sub.add_argument("--theta", type=float, default=0.5,
                     help="multipole acceptance parameter")
    sub.add_argument("--eps1", type=float, default=1.0, help="solute dielectric")
    sub.add_argument("--units", choices=("internal", "kcal"), default="internal",
                     help="internal (e^2/A) or kcal/mol energies")
    sub.add_argument("--workers", type=int, default=1,
                     help="worker processes (capped by FORGE_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="protforge",
                     description="Electrostatic and topological protein features")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    feat = subs.add_parser("featurize", help="feature CSV + manifest from PQR files")
    feat.add_argument("inputs", nargs="+", help="PQR files or directories")
    feat.add_argument("--out-dir", required=True)
    _add_common_featurize_flags(feat)
    feat.add_argument("--l-scale", type=float, default=50.0,
                      help="filtration scale in Angstrom")
    feat.add_argument("--n-bins", type=int, default=100)
    feat.add_argument("--max-dim", type=int, default=3)
    feat.add_argument("--simplex-cap", type=int, default=DEFAULT_SIMPLEX_CAP)
    feat.add_argument("--seed", type=int, default=0)
    feat.set_defaults(func=cmd_featurize)

    cou = subs.add_parser("coulomb", help="Coulomb energies by treecode")
    cou.add_argument("inputs", nargs="+")
    cou.add_argument("--out", default=None, help="output CSV (default stdout)")
    _add_common_featurize_flags(cou)
    cou.add_argument("--check", action="store_true",
                     help="also run the direct sum and report relative error")
    cou.set_defaults(func=cmd_coulomb, p=4, L=4)

    bar = subs.add_parser("barcode", help="persistence barcode JSON")
    bar.add_argument("inputs", nargs="+")
    bar.add_argument("--selector", choices=[s.value for s in AtomSelector],
                     default="heavy")
    bar.add_argument("--max-scale", type=float, default=50.0)
    bar.add_argument("--max-dim", type=int, default=3)
    bar.add_argument("--simplex-cap", type=int, default=DEFAULT_SIMPLEX_CAP)
    bar.add_argument("--out", default=None)
    bar.add_argument("--segments", default=None,
                     help="also write a bar-segment CSV for plotting")
    bar.set_defaults(func=cmd_barcode)

    gb = subs.add_parser("gb", help="Generalized Born solvation energy")
    gb.add_argument("inputs", nargs="+")
    gb.add_argument("--radii", required=True,
                    help="Born radii file, one value per atom in file order")
    gb.add_argument("--eps1", type=float, default=1.0)
    gb.add_argument("--eps2", type=float, default=80.0)
    gb.add_argument("--units", choices=("internal", "kcal"), default="internal")
    gb.add_argument("--out", default=None)
    gb.set_defaults(func=cmd_gb)

    ds = subs.add_parser("dataset",
                         help="join labels, IQR-filter, fit scalers, export")
    ds.add_argument("--features-dir", required=True,
                    help="directory produced by featurize")
    ds.add_argument("--labels", required=True, help="label CSV (id,E_coul,E_solv)")
    ds.add_argument("--out-dir", required=True)
    ds.add_argument("--label", choices=("E_coul", "E_solv"), default="E_coul")
    ds.add_argument("--iqr", action=argparse.BooleanOptionalAction, default=True,
                    help="IQR-filter on E_coul (default on)")
    ds.add_argument("--seed", type=int, default=0)
    ds.set_defaults(func=cmd_dataset)

    met = subs.add_parser("metrics", help="MSE/MAPE/R2 from a y,yhat CSV")
    met.add_argument("--pred", required=True)
    met.add_argument("--out", default=None)
    met.set_defaults(func=cmd_metrics)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except CapacityError as exc:
        log.error("%s", exc)
        return EXIT_CAPACITY
    except (ProtforgeError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_PARSE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
