"""
acdgcl - Adversarial cross-view disentangled graph contrastive learning

Self-supervised graph-level representation learning with a GIN encoder,
augmentation-invariant/dependent extractors, cross-view reconstruction and a
PGD-crafted adversarial view, plus linear-probe evaluation on TU benchmarks.
"""

__version__ = "0.1.0"

from acdgcl.advtrain import AdamState, EpochMetrics, TrainResult, adam_step, pgd_maximize, train
from acdgcl.config import ModelConfig, PgdConfig, ProbeConfig, TrainConfig, load_config
from acdgcl.errors import AcdgclError
from acdgcl.evaluation import (
    EvalReport,
    embed_dataset,
    evaluate_checkpoint,
    linear_probe,
    run_ablation,
    run_robustness_sweep,
)
from acdgcl.graphdata import Graph, GraphDataset, kfold_split, parse_tu_dataset, to_batch
from acdgcl.model import ModelParams, init_params, load_checkpoint, save_checkpoint

__all__ = [
    "__version__",
    "AcdgclError",
    # Data
    "Graph",
    "GraphDataset",
    "kfold_split",
    "parse_tu_dataset",
    "to_batch",
    # Configuration
    "ModelConfig",
    "PgdConfig",
    "ProbeConfig",
    "TrainConfig",
    "load_config",
    # Model
    "ModelParams",
    "init_params",
    "load_checkpoint",
    "save_checkpoint",
    # Training
    "AdamState",
    "EpochMetrics",
    "TrainResult",
    "adam_step",
    "pgd_maximize",
    "train",
    # Evaluation
    "EvalReport",
    "embed_dataset",
    "evaluate_checkpoint",
    "linear_probe",
    "run_ablation",
    "run_robustness_sweep",
]
