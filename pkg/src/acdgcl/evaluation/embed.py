"""Frozen-encoder embeddings of a whole dataset."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from acdgcl.advtrain import pgd_maximize
from acdgcl.augment import AugmentationSpec, apply_augmentation
from acdgcl.config import PgdConfig
from acdgcl.diffcore import no_tape
from acdgcl.diffcore.tensor import Array
from acdgcl.evaluation.errors import ProbeError
from acdgcl.graphdata import Graph, GraphDataset, GraphView, to_batch
from acdgcl.model import ModelParams, encode, extract

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """One invariant embedding row per graph, with the graph labels."""

    features: Array
    labels: NDArray[np.int64]

    def __post_init__(self) -> None:
        features = np.array(self.features, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.int64)
        if features.ndim != 2 or labels.shape != (features.shape[0],):
            raise ProbeError(f"{features.shape} features do not match {labels.shape} labels")
        if not np.all(np.isfinite(features)):
            raise ProbeError("embedding table holds non-finite values")
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.features.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])


def _chunks(n: int, size: int) -> list[range]:
    """Consecutive ranges of ``size``; a trailing single index joins the previous range."""
    bounds = list(range(0, n, size)) + [n]
    ranges = [range(a, b) for a, b in zip(bounds, bounds[1:], strict=False)]
    if len(ranges) > 1 and len(ranges[-1]) == 1:
        tail = ranges.pop()
        ranges[-1] = range(ranges[-1].start, tail.stop)
    return ranges


def embed_dataset(
    params: ModelParams,
    dataset: GraphDataset,
    *,
    family: Sequence[AugmentationSpec] | None = None,
    pgd: PgdConfig | None = None,
    temperature: float = 0.2,
    rng: np.random.Generator | None = None,
    batch_size: int = 128,
) -> EmbeddingTable:
    """Encode every graph and keep ``z_inv``.

    The default forward is deterministic: no augmentation, no perturbation.
    ``family`` embeds one randomly drawn augmented view per graph instead, and
    ``pgd`` perturbs the first hidden layer against the clean embeddings.
    Both need ``rng``.

    Raises:
        ProbeError: If the model's input width differs from the dataset's
            node-label classes, or a perturbed embedding lacks an ``rng``.
    """
    if params.in_dim != dataset.num_node_label_classes:
        raise ProbeError(
            f"model expects {params.in_dim} node-label classes, "
            f"dataset {dataset.name} has {dataset.num_node_label_classes}"
        )
    if (family or pgd) and rng is None:
        raise ProbeError("perturbed embeddings need a random generator")
    if pgd is not None and len(dataset) < 2:
        raise ProbeError("adversarial embeddings need at least 2 graphs")

    tensors = params.tensors()
    rows: list[Array] = []
    for chunk in _chunks(len(dataset), batch_size):
        graphs: list[Graph | GraphView] = [dataset[i] for i in chunk]
        if family and rng is not None:
            graphs = [
                apply_augmentation(dataset[i], family[int(rng.integers(len(family)))], rng)
                for i in chunk
            ]
        batch = to_batch(graphs, dataset.num_node_label_classes)
        with no_tape():
            z_inv = extract(encode(batch, tensors).z, tensors).z_inv
            if pgd is not None and rng is not None:
                attack = pgd_maximize(batch, params, z_inv, z_inv, pgd, rng, temperature)
                z_inv = extract(encode(batch, tensors, delta=attack.delta).z, tensors).z_inv
        rows.append(z_inv.data)

    logger.debug("embedded %d graphs from %s", len(dataset), dataset.name)
    return EmbeddingTable(features=np.concatenate(rows), labels=dataset.labels)
