"""Linear-probe evaluation of frozen embeddings.

The probe is an L2-regularized multinomial logistic regression trained by
full-batch gradient descent from a zero initialization, once per fold of a
k-fold split, for each split seed.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field

from acdgcl.config import ProbeConfig
from acdgcl.diffcore import Tape, backward, ops
from acdgcl.diffcore.tensor import Array
from acdgcl.evaluation.embed import EmbeddingTable, embed_dataset
from acdgcl.evaluation.errors import ProbeError
from acdgcl.graphdata import FoldSplit, GraphDataset, SplitError, kfold_split
from acdgcl.model import ModelParams

logger = logging.getLogger(__name__)


class EvalReport(BaseModel):
    """Held-out accuracies and their aggregates.

    ``fold_accuracies`` lists every fold of every seed, seed-major. ``std`` is
    taken over all folds, ``seed_std`` over the per-seed means.
    """

    fold_accuracies: list[float] = Field(default_factory=list)
    seeds: list[int] = Field(default_factory=list)
    folds: int
    mean: float
    std: float
    seed_means: list[float] = Field(default_factory=list)
    seed_std: float = 0.0
    config: dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_accuracies(
        cls,
        per_seed: Sequence[Sequence[float]],
        seeds: Sequence[int],
        folds: int,
        config: dict[str, Any] | None = None,
    ) -> EvalReport:
        flat = [float(a) for accs in per_seed for a in accs]
        seed_means = [float(np.mean(accs)) for accs in per_seed]
        return cls(
            fold_accuracies=flat,
            seeds=list(seeds),
            folds=folds,
            mean=float(np.mean(flat)),
            std=float(np.std(flat)),
            seed_means=seed_means,
            seed_std=float(np.std(seed_means)),
            config=config or {},
        )

    @classmethod
    def combine(cls, reports: Sequence[EvalReport], config: dict[str, Any] | None = None) -> EvalReport:
        """Merge single-seed reports into one."""
        if not reports:
            raise ProbeError("no reports to combine")
        folds = {r.folds for r in reports}
        if len(folds) != 1:
            raise ProbeError(f"cannot combine reports with fold counts {sorted(folds)}")
        per_seed = [r.fold_accuracies for r in reports]
        seeds = [s for r in reports for s in r.seeds]
        return cls.from_accuracies(per_seed, seeds, folds.pop(), config)


@dataclass(frozen=True)
class LinearClassifier:
    weights: Array
    bias: Array
    mean: Array
    scale: Array

    def logits(self, features: Array) -> Array:
        return ((features - self.mean) / self.scale) @ self.weights + self.bias

    def predict(self, features: Array) -> NDArray[np.int64]:
        # argmax resolves ties to the lowest class index
        return np.argmax(self.logits(features), axis=1).astype(np.int64)


def fit_classifier(
    features: Array,
    labels: NDArray[np.int64],
    num_classes: int,
    l2: float = 1e-3,
    epochs: int = 300,
    learning_rate: float = 0.5,
    standardize: bool = True,
) -> LinearClassifier:
    """Train multinomial logistic regression on one training fold.

    Raises:
        ProbeError: If the training labels hold fewer than two classes.
    """
    present = np.unique(labels)
    if present.size < 2:
        raise ProbeError(f"training fold contains a single class ({int(present[0])})")

    if standardize:
        mean = features.mean(axis=0)
        scale = features.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
    else:
        mean = np.zeros(features.shape[1])
        scale = np.ones(features.shape[1])
    x = (features - mean) / scale
    onehot = np.zeros((labels.shape[0], num_classes))
    onehot[np.arange(labels.shape[0]), labels] = 1.0

    weights = np.zeros((features.shape[1], num_classes))
    bias = np.zeros(num_classes)
    for _ in range(epochs):
        with Tape() as tape:
            w = tape.leaf("w", weights)
            b = tape.leaf("b", bias)
            logits = ops.add(ops.matmul(x, w), b)
            picked = ops.sum(ops.mul(logits, onehot), axis=1)
            nll = ops.mean(ops.sub(ops.logsumexp(logits, axis=1), picked))
            loss = ops.add(nll, ops.scale(ops.l2_norm_sq(w), l2))
        grads = backward(tape, loss)
        weights = weights - learning_rate * grads["w"]
        bias = bias - learning_rate * grads["b"]
    return LinearClassifier(weights=weights, bias=bias, mean=mean, scale=scale)


def linear_probe(
    table: EmbeddingTable,
    folds: FoldSplit,
    l2: float = 1e-3,
    epochs: int = 300,
    learning_rate: float = 0.5,
    standardize: bool = True,
    num_classes: int | None = None,
) -> EvalReport:
    """Cross-validated accuracy of a linear classifier on ``table``.

    Each fold's classifier sees only the features and labels of the other
    folds; standardization statistics come from the training part as well.

    Raises:
        ProbeError: If ``k < 2``, the split does not cover the table, or a
            training fold is single-class.
    """
    if folds.k < 2:
        raise ProbeError(f"need at least 2 folds, got {folds.k}")
    if folds.n != len(table):
        raise ProbeError(f"split covers {folds.n} rows, table has {len(table)}")
    classes = num_classes if num_classes is not None else int(table.labels.max()) + 1

    accuracies: list[float] = []
    for i in range(folds.k):
        train_idx, test_idx = folds.train_test(i)
        model = fit_classifier(
            table.features[train_idx],
            table.labels[train_idx],
            classes,
            l2=l2,
            epochs=epochs,
            learning_rate=learning_rate,
            standardize=standardize,
        )
        predicted = model.predict(table.features[test_idx])
        accuracies.append(float(np.mean(predicted == table.labels[test_idx])))
        logger.debug("fold %d/%d: accuracy %.4f", i + 1, folds.k, accuracies[-1])

    return EvalReport.from_accuracies([accuracies], [folds.seed], folds.k)


def evaluate_table(
    table: EmbeddingTable,
    probe: ProbeConfig,
    num_classes: int | None = None,
    config: dict[str, Any] | None = None,
) -> EvalReport:
    """Run the probe once per seed in ``probe.seeds`` and pool the folds."""
    reports = []
    for seed in probe.seeds:
        try:
            split = kfold_split(len(table), probe.folds, seed)
        except SplitError as e:
            raise ProbeError(str(e)) from None
        reports.append(
            linear_probe(
                table,
                split,
                l2=probe.l2,
                epochs=probe.epochs,
                learning_rate=probe.learning_rate,
                standardize=probe.standardize,
                num_classes=num_classes,
            )
        )
    report = EvalReport.combine(reports, config)
    logger.info(
        "probe: %.4f +/- %.4f over %d seed(s) x %d folds",
        report.mean,
        report.std,
        len(report.seeds),
        report.folds,
    )
    return report


def evaluate_checkpoint(
    params: ModelParams,
    dataset: GraphDataset,
    probe: ProbeConfig,
    config: dict[str, Any] | None = None,
) -> EvalReport:
    """Embed ``dataset`` with frozen ``params`` and run the full probe protocol."""
    table = embed_dataset(params, dataset)
    return evaluate_table(table, probe, dataset.num_graph_classes, config)
