"""The four graph augmentations used to build contrastive views.

Counts use ``floor`` for dropping/perturbing and ``ceil`` for the subgraph
size. Every operator keeps at least one node.
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import NDArray

from acdgcl.augment.base import (
    AugmentationError,
    AugmentationKind,
    AugmentationOperator,
    ceil_count,
    check_ratio,
    floor_count,
)
from acdgcl.graphdata import Graph, GraphView

logger = logging.getLogger(__name__)

# Absent pairs must outnumber the additions this many times over before
# edge_perturb samples them instead of listing them.
_REJECTION_FACTOR = 4


def node_drop(graph: Graph, ratio: float, rng: np.random.Generator) -> Graph:
    """Drop ``floor(ratio * n)`` uniformly chosen nodes, leaving at least one.

    Incident edges go with them; survivors keep their relative order.
    """
    check_ratio(ratio)
    n = graph.num_nodes
    count = min(floor_count(ratio, n), n - 1)
    if count == 0:
        return graph
    dropped = rng.choice(n, size=count, replace=False)
    keep = np.setdiff1d(np.arange(n), dropped)
    return graph.induced(keep)


def _absent_pairs_by_rejection(
    n: int, existing: set[tuple[int, int]], count: int, rng: np.random.Generator
) -> NDArray[np.int64]:
    """Draw ``count`` distinct absent pairs by resampling random ones."""
    chosen: set[tuple[int, int]] = set()
    while len(chosen) < count:
        u, v = (int(x) for x in rng.integers(n, size=2))
        if u == v:
            continue
        pair = (u, v) if u < v else (v, u)
        if pair not in existing:
            chosen.add(pair)
    return np.array(sorted(chosen), dtype=np.int64)


def edge_perturb(graph: Graph, ratio: float, rng: np.random.Generator) -> Graph:
    """Remove ``floor(ratio * |E|)`` edges and add as many new non-self-loop edges.

    New edges are drawn from pairs absent in the input graph; when fewer such
    pairs exist (a complete graph has none) only that many are added. Sparse
    graphs sample pairs directly instead of listing every absent one.
    """
    check_ratio(ratio)
    m = graph.num_edges
    count = floor_count(ratio, m)
    if count == 0:
        return graph

    removed = rng.choice(m, size=count, replace=False)
    kept = np.delete(graph.edges, removed, axis=0)

    n = graph.num_nodes
    existing = graph.edge_set()
    absent = n * (n - 1) // 2 - len(existing)
    additions = min(count, absent)
    if additions < count:
        logger.debug("edge_perturb: only %d of %d additions possible", additions, count)
    if additions == 0:
        return Graph.from_edges(n, kept, graph.node_labels, graph.label)

    if absent >= _REJECTION_FACTOR * additions:
        added = _absent_pairs_by_rejection(n, existing, additions, rng)
    else:
        candidates = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in existing]
        picked = rng.choice(len(candidates), size=additions, replace=False)
        added = np.array([candidates[i] for i in sorted(picked.tolist())], dtype=np.int64)
    return Graph.from_edges(n, np.concatenate([kept, added]), graph.node_labels, graph.label)


def attribute_mask(graph: Graph, ratio: float, rng: np.random.Generator) -> NDArray[np.bool_]:
    """Choose ``floor(ratio * n)`` nodes whose feature rows become uniform.

    Returns:
        Boolean overlay, ``True`` for masked rows; topology is untouched.
    """
    check_ratio(ratio)
    n = graph.num_nodes
    masked = np.zeros(n, dtype=bool)
    count = floor_count(ratio, n)
    if count:
        masked[rng.choice(n, size=count, replace=False)] = True
    return masked


def subgraph_sample(graph: Graph, ratio: float, rng: np.random.Generator) -> Graph:
    """Random-walk induced subgraph with ``ceil(ratio * n)`` nodes.

    The walk starts at a uniform node and moves to uniform neighbours until
    enough distinct nodes are collected or ``10 * n`` steps elapse; any
    shortfall is padded with uniformly chosen unvisited nodes.
    """
    check_ratio(ratio)
    if ratio == 0.0:
        raise AugmentationError("subgraph ratio must be positive")
    n = graph.num_nodes
    target = max(1, min(n, ceil_count(ratio, n)))
    if target == n:
        return graph

    adjacency = graph.neighbors()
    current = int(rng.integers(n))
    visited = {current}
    for _ in range(10 * n):
        if len(visited) >= target:
            break
        options = adjacency[current]
        if options:
            current = options[int(rng.integers(len(options)))]
            visited.add(current)

    if len(visited) < target:
        unvisited = np.array([v for v in range(n) if v not in visited], dtype=np.int64)
        padding = rng.choice(unvisited, size=target - len(visited), replace=False)
        visited.update(int(v) for v in padding)
    return graph.induced(sorted(visited))


class NodeDrop(AugmentationOperator):
    @property
    def kind(self) -> AugmentationKind:
        return AugmentationKind.NODE_DROP

    def apply(self, graph: Graph, ratio: float, rng: np.random.Generator) -> GraphView:
        return GraphView(node_drop(graph, ratio, rng))


class EdgePerturb(AugmentationOperator):
    @property
    def kind(self) -> AugmentationKind:
        return AugmentationKind.EDGE_PERTURB

    def apply(self, graph: Graph, ratio: float, rng: np.random.Generator) -> GraphView:
        return GraphView(edge_perturb(graph, ratio, rng))


class AttributeMask(AugmentationOperator):
    @property
    def kind(self) -> AugmentationKind:
        return AugmentationKind.ATTRIBUTE_MASK

    def apply(self, graph: Graph, ratio: float, rng: np.random.Generator) -> GraphView:
        return GraphView(graph, attribute_mask(graph, ratio, rng))


class SubgraphSample(AugmentationOperator):
    @property
    def kind(self) -> AugmentationKind:
        return AugmentationKind.SUBGRAPH

    def apply(self, graph: Graph, ratio: float, rng: np.random.Generator) -> GraphView:
        return GraphView(subgraph_sample(graph, ratio, rng))

    def identity_ratio(self) -> float:
        return 1.0
