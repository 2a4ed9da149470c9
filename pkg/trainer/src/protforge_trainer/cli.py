"""protforge-train: fit the two-branch network on a dataset export."""

from __future__ import annotations

import argparse
import logging
import sys

from .data import DatasetError
from .model import NetworkSpec
from .train import TrainConfig, cross_validate, train_and_evaluate


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="protforge-train",
        description="Train the two-branch energy regressor on a dataset export",
    )
    parser.add_argument("dataset_dir", help="directory with features.csv + manifest.json")
    parser.add_argument("--out-dir", default="train_out")
    parser.add_argument("--epochs", type=int, default=500)
    parser.add_argument("--learning-rate", type=float, default=1e-4)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--test-fraction", type=float, default=0.2)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--cv", action="store_true", help="5-fold cross-validation")
    parser.add_argument("--folds", type=int, default=5)
    parser.add_argument("--no-topo", action="store_true",
                        help="electrostatic-features-only ablation")
    parser.add_argument("--no-electro", action="store_true",
                        help="topological-features-only ablation")
    parser.add_argument("--dropout", type=float, default=0.2)
    parser.add_argument("--no-batch-norm", action="store_true")
    parser.add_argument("--pool-width", type=int, default=2)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = TrainConfig(
            epochs=args.epochs,
            learning_rate=args.learning_rate,
            batch_size=args.batch_size,
            test_fraction=args.test_fraction,
            folds=args.folds,
            seed=args.seed,
            use_topo=not args.no_topo,
            use_electro=not args.no_electro,
        )
        spec = NetworkSpec(
            dropout_rate=args.dropout,
            batch_norm=not args.no_batch_norm,
            pool_width=args.pool_width,
        )
        if args.cv:
            report = cross_validate(args.dataset_dir, config, spec, args.out_dir)
        else:
            report = train_and_evaluate(args.dataset_dir, config, spec,
                                        args.out_dir)
    except (DatasetError, ValueError, OSError) as exc:
        logging.getLogger("protforge_trainer").error("%s", exc)
        return 1
    print(f"mse={report['mse']:.6g} r2={report['r2']:.6g}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
