"""Graph data models.

Graphs are immutable: numpy arrays held by these dataclasses are marked
read-only, so a parsed dataset can be shared freely between workers.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from acdgcl.diffcore import Tensor
from acdgcl.errors import AcdgclError

IntArray = NDArray[np.int64]


class GraphValidationError(AcdgclError):
    """A graph or dataset violates its structural invariants."""


def _readonly(values: ArrayLike, shape: tuple[int, ...] | None = None) -> IntArray:
    array = np.array(values, dtype=np.int64)
    if shape is not None:
        array = array.reshape(shape)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Graph:
    """An undirected graph with categorical node labels and a class label.

    Attributes:
        num_nodes: Number of nodes (at least one).
        edges: ``(E, 2)`` array of undirected pairs, each stored once.
        node_labels: Categorical label per node.
        label: Graph class index.
    """

    num_nodes: int
    edges: IntArray
    node_labels: IntArray
    label: int = 0

    def __post_init__(self) -> None:
        edges = _readonly(self.edges, (-1, 2))
        labels = _readonly(self.node_labels)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "node_labels", labels)
        if self.num_nodes < 1:
            raise GraphValidationError("graph must have at least one node")
        if labels.shape != (self.num_nodes,):
            raise GraphValidationError(
                f"expected {self.num_nodes} node labels, got {labels.shape[0]}"
            )
        if edges.size:
            if edges.min() < 0 or edges.max() >= self.num_nodes:
                raise GraphValidationError(
                    f"edge endpoint outside [0, {self.num_nodes})"
                )
            if np.any(edges[:, 0] == edges[:, 1]):
                raise GraphValidationError("self-loops are not allowed")

    @classmethod
    def from_edges(
        cls,
        num_nodes: int,
        edges: Sequence[tuple[int, int]] | IntArray,
        node_labels: Sequence[int] | IntArray | None = None,
        label: int = 0,
    ) -> Graph:
        """Build a graph, canonicalising pairs and dropping duplicates and self-loops."""
        pairs = np.array(edges, dtype=np.int64).reshape(-1, 2)
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        pairs = np.sort(pairs, axis=1)
        if pairs.size:
            pairs = np.unique(pairs, axis=0)
        if node_labels is None:
            node_labels = np.zeros(num_nodes, dtype=np.int64)
        return cls(num_nodes=num_nodes, edges=pairs, node_labels=np.asarray(node_labels), label=label)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> IntArray:
        deg = np.zeros(self.num_nodes, dtype=np.int64)
        np.add.at(deg, self.edges.reshape(-1), 1)
        return deg

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def neighbors(self) -> list[list[int]]:
        adjacency: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for u, v in self.edges:
            adjacency[int(u)].append(int(v))
            adjacency[int(v)].append(int(u))
        return adjacency

    def induced(self, keep: ArrayLike) -> Graph:
        """Subgraph on ``keep``, re-indexed in ascending original order."""
        nodes = np.unique(np.asarray(keep, dtype=np.int64))
        remap = np.full(self.num_nodes, -1, dtype=np.int64)
        remap[nodes] = np.arange(nodes.size)
        mapped = remap[self.edges] if self.edges.size else self.edges.reshape(-1, 2)
        mask = np.all(mapped >= 0, axis=1) if mapped.size else np.zeros(0, dtype=bool)
        return Graph(
            num_nodes=int(nodes.size),
            edges=mapped[mask],
            node_labels=self.node_labels[nodes],
            label=self.label,
        )

    def permuted(self, permutation: ArrayLike) -> Graph:
        """Relabel nodes: old node ``i`` becomes ``permutation[i]``."""
        perm = np.asarray(permutation, dtype=np.int64)
        labels = np.empty_like(self.node_labels)
        labels[perm] = self.node_labels
        return Graph.from_edges(self.num_nodes, perm[self.edges], labels, self.label)


@dataclass(frozen=True, eq=False)
class GraphView:
    """A graph plus an attribute-mask overlay (``True`` rows are masked)."""

    graph: Graph
    masked: NDArray[np.bool_] | None = None

    def __post_init__(self) -> None:
        if self.masked is not None:
            masked = np.array(self.masked, dtype=bool)
            if masked.shape != (self.graph.num_nodes,):
                raise GraphValidationError(
                    f"mask has shape {masked.shape}, graph has {self.graph.num_nodes} nodes"
                )
            masked.setflags(write=False)
            object.__setattr__(self, "masked", masked)


@dataclass(frozen=True, eq=False)
class GraphDataset:
    """An ordered, immutable collection of graphs."""

    graphs: tuple[Graph, ...]
    num_node_label_classes: int
    num_graph_classes: int
    name: str = "dataset"

    def __post_init__(self) -> None:
        object.__setattr__(self, "graphs", tuple(self.graphs))
        for i, g in enumerate(self.graphs):
            if g.node_labels.size and g.node_labels.max() >= self.num_node_label_classes:
                raise GraphValidationError(
                    f"graph {i}: node label {int(g.node_labels.max())} >= "
                    f"{self.num_node_label_classes} classes"
                )
            if not 0 <= g.label < self.num_graph_classes:
                raise GraphValidationError(
                    f"graph {i}: label {g.label} outside [0, {self.num_graph_classes})"
                )

    def __len__(self) -> int:
        return len(self.graphs)

    def __iter__(self) -> Iterator[Graph]:
        return iter(self.graphs)

    def __getitem__(self, index: int) -> Graph:
        return self.graphs[index]

    @property
    def labels(self) -> IntArray:
        return _readonly([g.label for g in self.graphs])

    def subset(self, indices: Sequence[int] | IntArray) -> GraphDataset:
        return GraphDataset(
            graphs=tuple(self.graphs[int(i)] for i in indices),
            num_node_label_classes=self.num_node_label_classes,
            num_graph_classes=self.num_graph_classes,
            name=self.name,
        )


@dataclass(frozen=True, eq=False)
class GraphBatch:
    """Disjoint union of graphs ready for message passing.

    Attributes:
        node_features: ``(total_nodes, C)`` one-hot (or uniform, when masked) rows.
        edge_index: ``(2, 2E)`` directed source/target rows, both directions.
        segment_ids: Graph index per node, non-decreasing.
        num_graphs: Number of graphs in the batch.
    """

    node_features: Tensor
    edge_index: IntArray
    segment_ids: IntArray
    num_graphs: int

    @property
    def num_nodes(self) -> int:
        return int(self.segment_ids.shape[0])

    def nodes_per_graph(self) -> IntArray:
        return _readonly(np.bincount(self.segment_ids, minlength=self.num_graphs))


@dataclass(frozen=True, eq=False)
class FoldSplit:
    """Partition of ``[0, n)`` into ``k`` disjoint folds."""

    folds: tuple[IntArray, ...]
    n: int
    seed: int = 0
    _all: IntArray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        frozen = tuple(_readonly(np.sort(f)) for f in self.folds)
        object.__setattr__(self, "folds", frozen)
        object.__setattr__(self, "_all", _readonly(np.arange(self.n)))

    @property
    def k(self) -> int:
        return len(self.folds)

    def train_test(self, i: int) -> tuple[IntArray, IntArray]:
        """Indices of the other ``k-1`` folds and of fold ``i``."""
        test = self.folds[i]
        train = np.setdiff1d(self._all, test, assume_unique=True)
        return train, test
