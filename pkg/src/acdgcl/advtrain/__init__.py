"""Adversarial min-max training: PGD attack, Adam updates, the epoch loop."""

from acdgcl.advtrain.adam import AdamState, adam_step
from acdgcl.advtrain.errors import TrainingError
from acdgcl.advtrain.metrics import (
    METRICS_HEADER,
    EpochMetrics,
    read_metrics_csv,
    write_metrics_csv,
)
from acdgcl.advtrain.pgd import PgdResult, pgd_maximize
from acdgcl.advtrain.trainer import (
    CHECKPOINT_FILE,
    CONFIG_FILE,
    METRICS_FILE,
    EpochLosses,
    TrainResult,
    make_batches,
    train,
    train_epoch,
)
from acdgcl.config import PgdConfig, TrainConfig

__all__ = [
    "CHECKPOINT_FILE",
    "CONFIG_FILE",
    "METRICS_FILE",
    "METRICS_HEADER",
    "AdamState",
    "EpochLosses",
    "EpochMetrics",
    "PgdConfig",
    "PgdResult",
    "TrainConfig",
    "TrainResult",
    "TrainingError",
    "adam_step",
    "make_batches",
    "pgd_maximize",
    "read_metrics_csv",
    "train",
    "train_epoch",
    "write_metrics_csv",
]
