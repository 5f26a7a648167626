from .config import TrainConfig, parse_run_config
from .data import (
    AngularResolutionError,
    DatasetError,
    LfDataset,
    PatchSample,
    ingest_dataset,
    make_pair,
    sample_batch,
)
from .loop import TrainingError, train_loop, train_step

__all__ = [
    "AngularResolutionError",
    "DatasetError",
    "LfDataset",
    "PatchSample",
    "TrainConfig",
    "TrainingError",
    "ingest_dataset",
    "make_pair",
    "parse_run_config",
    "sample_batch",
    "train_loop",
    "train_step",
]
