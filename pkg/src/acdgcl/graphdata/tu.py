"""TU Dortmund graph-classification dataset reader and writer.

A dataset named ``DS`` is a directory holding:

    DS_A.txt                 one directed edge "u, v" per line, 1-based global node ids
    DS_graph_indicator.txt   graph id (1-based) of node i on line i
    DS_graph_labels.txt      class value of graph i on line i
    DS_node_labels.txt       optional categorical label of node i on line i

Node ids are remapped to 0-based per-graph indices, graph labels to contiguous
classes in sorted-unique order, and node labels likewise. Self-loops and
duplicate undirected edges are dropped.
"""

from __future__ import annotations

import logging
import re
from pathlib import Path

import numpy as np

from acdgcl.errors import AcdgclError
from acdgcl.graphdata.models import Graph, GraphDataset

logger = logging.getLogger(__name__)

_SEPARATOR = re.compile(r"[,\s]+")


class DatasetError(AcdgclError):
    """A dataset directory is missing files or holds malformed records."""


def _read_records(path: Path, width: int) -> list[tuple[int, tuple[int, ...]]]:
    """Read integer records as ``(line number, values)``, skipping blank lines."""
    records: list[tuple[int, tuple[int, ...]]] = []
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            fields = [f for f in _SEPARATOR.split(text) if f]
            if len(fields) != width:
                raise DatasetError(
                    f"{path.name}:{lineno}: expected {width} value(s), got {len(fields)}"
                )
            try:
                records.append((lineno, tuple(int(f) for f in fields)))
            except ValueError:
                raise DatasetError(f"{path.name}:{lineno}: not an integer record: {text!r}") from None
    return records


def _dataset_name(directory: Path) -> str:
    matches = sorted(directory.glob("*_graph_indicator.txt"))
    if not matches:
        raise DatasetError(f"{directory}: missing *_graph_indicator.txt")
    return matches[0].name[: -len("_graph_indicator.txt")]


def _require(directory: Path, name: str, suffix: str) -> Path:
    path = directory / f"{name}_{suffix}"
    if not path.is_file():
        raise DatasetError(f"missing required file {path.name} in {directory}")
    return path


def parse_tu_dataset(directory: Path | str, name: str | None = None) -> GraphDataset:
    """Parse a TU-format dataset directory.

    Args:
        directory: Directory holding the ``<name>_*.txt`` files.
        name: Dataset prefix; inferred from the indicator file when omitted.

    Returns:
        The parsed dataset, graph ``i`` matching indicator value ``i + 1``.

    Raises:
        DatasetError: On a missing mandatory file, an edge referencing an
            unknown node or crossing graphs, or an empty graph.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetError(f"dataset directory not found: {directory}")
    name = name or _dataset_name(directory)

    indicator_path = _require(directory, name, "graph_indicator.txt")
    edges_path = _require(directory, name, "A.txt")
    labels_path = _require(directory, name, "graph_labels.txt")
    node_labels_path = directory / f"{name}_node_labels.txt"

    indicator = np.array([r[0] for _, r in _read_records(indicator_path, 1)], dtype=np.int64)
    if indicator.size == 0:
        raise DatasetError(f"{indicator_path.name}: no nodes")
    graph_values = [r[0] for _, r in _read_records(labels_path, 1)]
    num_graphs = len(graph_values)

    if indicator.min() < 1 or indicator.max() > num_graphs:
        raise DatasetError(
            f"{indicator_path.name}: graph ids must lie in [1, {num_graphs}] "
            f"({labels_path.name} lists {num_graphs} graphs)"
        )
    if np.any(np.diff(indicator) < 0):
        raise DatasetError(f"{indicator_path.name}: graph ids must be non-decreasing")
    sizes = np.bincount(indicator - 1, minlength=num_graphs)
    empty = np.flatnonzero(sizes == 0)
    if empty.size:
        raise DatasetError(f"graph {int(empty[0]) + 1} has no nodes")
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]])

    if node_labels_path.is_file():
        raw_node_labels = np.array([r[0] for _, r in _read_records(node_labels_path, 1)], dtype=np.int64)
        if raw_node_labels.size != indicator.size:
            raise DatasetError(
                f"{node_labels_path.name}: {raw_node_labels.size} labels for {indicator.size} nodes"
            )
        node_classes, node_labels = np.unique(raw_node_labels, return_inverse=True)
        num_node_classes = int(node_classes.size)
    else:
        logger.info("%s: no node labels, using a single constant label", name)
        node_labels = np.zeros(indicator.size, dtype=np.int64)
        num_node_classes = 1

    per_graph_edges: list[list[tuple[int, int]]] = [[] for _ in range(num_graphs)]
    total_nodes = indicator.size
    for lineno, (u, v) in _read_records(edges_path, 2):
        for node in (u, v):
            if not 1 <= node <= total_nodes:
                raise DatasetError(
                    f"{edges_path.name}:{lineno}: node {node} not in {indicator_path.name} "
                    f"({total_nodes} nodes)"
                )
        gu, gv = indicator[u - 1], indicator[v - 1]
        if gu != gv:
            raise DatasetError(f"{edges_path.name}:{lineno}: edge ({u}, {v}) joins two graphs")
        base = offsets[gu - 1]
        per_graph_edges[gu - 1].append((u - 1 - base, v - 1 - base))

    graph_classes = sorted(set(graph_values))
    class_of = {value: i for i, value in enumerate(graph_classes)}

    graphs = []
    for i in range(num_graphs):
        start, size = int(offsets[i]), int(sizes[i])
        graphs.append(
            Graph.from_edges(
                size,
                per_graph_edges[i],
                node_labels[start : start + size],
                class_of[graph_values[i]],
            )
        )

    dataset = GraphDataset(
        graphs=tuple(graphs),
        num_node_label_classes=num_node_classes,
        num_graph_classes=len(graph_classes),
        name=name,
    )
    logger.info(
        "parsed %s: %d graphs, %d classes, %d node-label classes",
        name,
        len(dataset),
        dataset.num_graph_classes,
        dataset.num_node_label_classes,
    )
    return dataset


def write_tu_dataset(dataset: GraphDataset, directory: Path | str, name: str | None = None) -> Path:
    """Write ``dataset`` in TU format (both edge directions, 1-based ids).

    Returns:
        The directory written to.
    """
    directory = Path(directory)
    name = name or dataset.name
    directory.mkdir(parents=True, exist_ok=True)

    edge_lines: list[str] = []
    indicator_lines: list[str] = []
    node_label_lines: list[str] = []
    offset = 0
    for gid, graph in enumerate(dataset.graphs, start=1):
        indicator_lines.extend([str(gid)] * graph.num_nodes)
        node_label_lines.extend(str(int(x)) for x in graph.node_labels)
        for u, v in graph.edges:
            a, b = int(u) + offset + 1, int(v) + offset + 1
            edge_lines.append(f"{a}, {b}")
            edge_lines.append(f"{b}, {a}")
        offset += graph.num_nodes

    def write(suffix: str, lines: list[str]) -> None:
        text = "\n".join(lines) + ("\n" if lines else "")
        (directory / f"{name}_{suffix}").write_text(text, encoding="utf-8")

    write("A.txt", edge_lines)
    write("graph_indicator.txt", indicator_lines)
    write("graph_labels.txt", [str(g.label) for g in dataset.graphs])
    write("node_labels.txt", node_label_lines)
    return directory


def resolve_dataset_dir(path: Path | str) -> Path:
    """Accept either a TU directory or a root holding exactly one such directory."""
    path = Path(path)
    if any(path.glob("*_graph_indicator.txt")):
        return path
    candidates = sorted(p for p in path.iterdir() if p.is_dir() and any(p.glob("*_graph_indicator.txt"))) if path.is_dir() else []
    if len(candidates) == 1:
        return candidates[0]
    if not candidates:
        raise DatasetError(f"no TU dataset found under {path}")
    names = ", ".join(p.name for p in candidates)
    raise DatasetError(f"several datasets under {path} ({names}); pass one directory")
