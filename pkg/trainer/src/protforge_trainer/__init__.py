"""protforge-trainer: two-branch convolutional/dense regression network
over exported protforge feature datasets."""

__version__ = "0.1.0"

from .data import Dataset, load_dataset, standardized_inputs
from .metrics import regression_metrics
from .model import NetworkSpec, build_model
from .train import TrainConfig, cross_validate, train_and_evaluate

__all__ = [
    "Dataset",
    "NetworkSpec",
    "TrainConfig",
    "build_model",
    "cross_validate",
    "load_dataset",
    "regression_metrics",
    "standardized_inputs",
    "train_and_evaluate",
]
