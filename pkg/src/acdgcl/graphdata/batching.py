"""Disjoint-union batching of graphs."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from acdgcl.diffcore import Tensor
from acdgcl.graphdata.models import Graph, GraphBatch, GraphValidationError, GraphView


def to_batch(
    graphs: Sequence[Graph | GraphView],
    num_node_label_classes: int,
) -> GraphBatch:
    """Stack graphs into one batch with one-hot node features.

    Node indices are shifted by each graph's global offset and every
    undirected edge is emitted in both directions. Rows masked by a
    :class:`GraphView` overlay become the uniform vector ``1/C``.

    Raises:
        GraphValidationError: If the list is empty or a node label is out of range.
    """
    if not graphs:
        raise GraphValidationError("cannot batch an empty list of graphs")
    if num_node_label_classes < 1:
        raise GraphValidationError("need at least one node-label class")

    views = [g if isinstance(g, GraphView) else GraphView(g) for g in graphs]
    features: list[np.ndarray] = []
    sources: list[np.ndarray] = []
    targets: list[np.ndarray] = []
    segments: list[np.ndarray] = []
    offset = 0
    for index, view in enumerate(views):
        graph = view.graph
        labels = graph.node_labels
        if labels.min() < 0 or labels.max() >= num_node_label_classes:
            raise GraphValidationError(
                f"graph {index}: node label {int(labels.max())} outside "
                f"[0, {num_node_label_classes})"
            )
        onehot = np.zeros((graph.num_nodes, num_node_label_classes), dtype=np.float64)
        onehot[np.arange(graph.num_nodes), labels] = 1.0
        if view.masked is not None and view.masked.any():
            onehot[view.masked] = 1.0 / num_node_label_classes
        features.append(onehot)

        u = graph.edges[:, 0] + offset
        v = graph.edges[:, 1] + offset
        sources.extend([u, v])
        targets.extend([v, u])
        segments.append(np.full(graph.num_nodes, index, dtype=np.int64))
        offset += graph.num_nodes

    edge_index = np.stack(
        [np.concatenate(sources).astype(np.int64), np.concatenate(targets).astype(np.int64)]
    )
    edge_index.setflags(write=False)
    segment_ids = np.concatenate(segments)
    segment_ids.setflags(write=False)
    return GraphBatch(
        node_features=Tensor(np.concatenate(features)),
        edge_index=edge_index,
        segment_ids=segment_ids,
        num_graphs=len(views),
    )
