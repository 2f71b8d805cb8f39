"""Graph datasets: TU parsing, batching, and cross-validation splits."""

from acdgcl.graphdata.batching import to_batch
from acdgcl.graphdata.models import (
    FoldSplit,
    Graph,
    GraphBatch,
    GraphDataset,
    GraphValidationError,
    GraphView,
)
from acdgcl.graphdata.splits import SplitError, kfold_split
from acdgcl.graphdata.tu import DatasetError, parse_tu_dataset, resolve_dataset_dir, write_tu_dataset

__all__ = [
    "DatasetError",
    "FoldSplit",
    "Graph",
    "GraphBatch",
    "GraphDataset",
    "GraphValidationError",
    "GraphView",
    "SplitError",
    "kfold_split",
    "parse_tu_dataset",
    "resolve_dataset_dir",
    "to_batch",
    "write_tu_dataset",
]
