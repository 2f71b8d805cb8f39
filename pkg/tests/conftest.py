import os
from pathlib import Path

import numpy as np
import pytest

from acdgcl.augment import AugmentationKind, AugmentationSpec
from acdgcl.config import DATA_DIR_ENV, ModelConfig, PgdConfig, ProbeConfig, TrainConfig
from acdgcl.graphdata import Graph, GraphDataset, parse_tu_dataset


def write_toy_tu(directory: Path, name: str = "TOY") -> Path:
    """Write the triangle + single-edge fixture in TU format."""
    directory.mkdir(parents=True, exist_ok=True)
    # triangle on nodes 1-3, single edge 4-5; both directions as TU files do
    (directory / f"{name}_A.txt").write_text(
        "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n"
    )
    (directory / f"{name}_graph_indicator.txt").write_text("1\n1\n1\n2\n2\n")
    (directory / f"{name}_graph_labels.txt").write_text("1\n-1\n")
    (directory / f"{name}_node_labels.txt").write_text("0\n1\n2\n0\n1\n")
    return directory


def random_graph(rng: np.random.Generator, num_classes: int = 3, label: int = 0) -> Graph:
    n = int(rng.integers(4, 9))
    edges = [(i, i + 1) for i in range(n - 1)]
    for _ in range(n // 2):
        u, v = rng.choice(n, size=2, replace=False)
        edges.append((int(u), int(v)))
    labels = rng.integers(0, num_classes, size=n)
    return Graph.from_edges(n, edges, labels, label)


def make_dataset(num_graphs: int = 20, seed: int = 0, num_classes: int = 3) -> GraphDataset:
    """Random connected graphs whose class is the parity of the graph index."""
    rng = np.random.default_rng(seed)
    graphs = tuple(random_graph(rng, num_classes, label=i % 2) for i in range(num_graphs))
    return GraphDataset(
        graphs=graphs, num_node_label_classes=num_classes, num_graph_classes=2, name="RANDOM"
    )


@pytest.fixture
def toy_tu_dir(tmp_path):
    """TU directory holding a triangle and a single edge."""
    return write_toy_tu(tmp_path / "TOY")


@pytest.fixture
def toy_dataset(toy_tu_dir):
    return parse_tu_dataset(toy_tu_dir)


@pytest.fixture
def random_dataset():
    """Twenty small random graphs over three node-label classes."""
    return make_dataset()


@pytest.fixture
def tiny_config():
    """A configuration small enough for unit-test training runs."""
    return TrainConfig(
        epochs=2,
        batch_size=5,
        learning_rate=1e-2,
        model=ModelConfig(num_layers=2, hidden_dim=8, embed_dim=4),
        pgd=PgdConfig(epsilon=0.05, steps=2),
        augmentations=[
            AugmentationSpec(kind=AugmentationKind.NODE_DROP, ratio=0.2),
            AugmentationSpec(kind=AugmentationKind.ATTRIBUTE_MASK, ratio=0.2),
        ],
        probe=ProbeConfig(epochs=20, folds=2, seeds=[0]),
    )


@pytest.fixture
def mutag_dir():
    """MUTAG under $ACDGCL_DATA_DIR, or skip."""
    root = os.environ.get(DATA_DIR_ENV)
    if not root:
        pytest.skip(f"{DATA_DIR_ENV} not set")
    for candidate in (Path(root), Path(root) / "MUTAG"):
        if (candidate / "MUTAG_graph_indicator.txt").is_file():
            return candidate
    pytest.skip(f"MUTAG not found under {root}")


@pytest.fixture
def dataset_factory():
    """Build random datasets of a chosen size and seed."""
    return make_dataset
