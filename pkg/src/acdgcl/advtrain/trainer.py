"""Min-max training loop: PGD inside, Adam outside."""

from __future__ import annotations

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from acdgcl.advtrain.adam import AdamState, adam_step
from acdgcl.advtrain.errors import TrainingError
from acdgcl.advtrain.metrics import EpochMetrics, write_metrics_csv
from acdgcl.advtrain.pgd import pgd_maximize
from acdgcl.augment import sample_view_pair
from acdgcl.config import TrainConfig, save_config
from acdgcl.diffcore import Tape, Tensor, backward
from acdgcl.graphdata import GraphDataset, to_batch
from acdgcl.model import ModelParams, encode, extract, init_params, save_checkpoint
from acdgcl.objective import ObjectiveWeights, compute_losses

logger = logging.getLogger(__name__)

CHECKPOINT_FILE = "checkpoint.json"
METRICS_FILE = "metrics.csv"
CONFIG_FILE = "config.json"

EpochCallback = Callable[[EpochMetrics], None]


@dataclass
class EpochLosses:
    """Batch-averaged losses of one epoch plus attack bookkeeping."""

    l_inv: float
    l_recon: float
    l_adv: float
    total: float
    batch_totals: list[float] = field(default_factory=list)
    pgd_calls: int = 0
    pgd_regressions: int = 0

    @property
    def num_batches(self) -> int:
        return len(self.batch_totals)


@dataclass
class TrainResult:
    params: ModelParams
    metrics: list[EpochMetrics]
    initial_params: ModelParams
    checkpoint_path: Path | None = None
    metrics_path: Path | None = None


def make_batches(n: int, batch_size: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Shuffle ``range(n)`` into batches, dropping a trailing batch of one."""
    order = rng.permutation(n)
    batches = [order[i : i + batch_size] for i in range(0, n, batch_size)]
    if batches and len(batches[-1]) < 2:
        logger.debug("dropping short batch of %d graph(s)", len(batches[-1]))
        batches.pop()
    return batches


def train_epoch(
    dataset: GraphDataset,
    params: ModelParams,
    state: AdamState,
    config: TrainConfig,
    rng: np.random.Generator,
) -> tuple[ModelParams, AdamState, EpochLosses]:
    """One pass over the dataset in shuffled mini-batches.

    Each batch draws a view pair per graph, computes the invariance and
    reconstruction terms, and when ``lambda_a > 0`` attacks the original
    (unaugmented) graphs before adding the adversarial term.

    Raises:
        TrainingError: If the dataset is empty or the batch size is below 2.
    """
    if config.batch_size < 2:
        raise TrainingError(f"batch_size must be at least 2, got {config.batch_size}")
    if len(dataset) < 2:
        raise TrainingError(f"need at least 2 graphs to train, got {len(dataset)}")

    weights = ObjectiveWeights.from_config(config)
    num_classes = dataset.num_node_label_classes
    sums = {"l_inv": 0.0, "l_recon": 0.0, "l_adv": 0.0}
    losses = EpochLosses(0.0, 0.0, 0.0, 0.0)

    for index in make_batches(len(dataset), config.batch_size, rng):
        graphs = [dataset[int(i)] for i in index]
        pairs = [sample_view_pair(g, config.augmentations, rng) for g in graphs]
        view1 = to_batch([p.view1 for p in pairs], num_classes)
        view2 = to_batch([p.view2 for p in pairs], num_classes)
        original = to_batch(graphs, num_classes) if weights.lambda_a > 0 else None

        with Tape() as tape:
            tensors = params.tensors(tape)

            def adversary(z1_inv: Tensor, z2_inv: Tensor) -> Tensor:
                assert original is not None
                result = pgd_maximize(
                    original, params, z1_inv, z2_inv, config.pgd, rng, config.temperature
                )
                losses.pgd_calls += 1
                if not result.improved:
                    losses.pgd_regressions += 1
                    logger.debug(
                        "pgd ended below its start (%.6f < %.6f)",
                        result.final_loss,
                        result.initial_loss,
                    )
                z = encode(original, tensors, delta=result.delta).z
                return extract(z, tensors).z_inv

            breakdown = compute_losses(view1, view2, tensors, weights, adversary)

        grads = backward(tape, breakdown.total)
        params, state = adam_step(params, grads, state, config.learning_rate)

        values = breakdown.as_floats()
        for key in sums:
            sums[key] += values[key]
        losses.batch_totals.append(values["total"])
        logger.debug("batch of %d: total=%.6f", len(index), values["total"])

    count = losses.num_batches
    losses.l_inv = sums["l_inv"] / count
    losses.l_recon = sums["l_recon"] / count
    losses.l_adv = sums["l_adv"] / count
    losses.total = float(np.mean(losses.batch_totals))
    if losses.pgd_regressions:
        logger.warning(
            "pgd finished below its starting loss on %d of %d batches",
            losses.pgd_regressions,
            losses.pgd_calls,
        )
    return params, state, losses


def train(
    config: TrainConfig,
    dataset: GraphDataset,
    out_dir: Path | str | None = None,
    callback: EpochCallback | None = None,
) -> TrainResult:
    """Initialize from ``config.seed`` and run ``config.epochs`` epochs.

    With ``out_dir`` the final checkpoint, the metrics CSV and the resolved
    configuration are written there.

    Raises:
        TrainingError: On invalid input or when outputs cannot be written.
    """
    rng = np.random.default_rng(config.seed)
    initial = init_params(config.model, dataset.num_node_label_classes, rng)
    params, state = initial, AdamState.zeros(initial)
    metrics: list[EpochMetrics] = []
    logger.info(
        "training on %s: %d graphs, %d parameters, %d epochs",
        dataset.name,
        len(dataset),
        initial.count(),
        config.epochs,
    )

    for epoch in range(1, config.epochs + 1):
        start = time.perf_counter()
        params, state, losses = train_epoch(dataset, params, state, config, rng)
        seconds = time.perf_counter() - start if config.record_wall_time else 0.0
        row = EpochMetrics(epoch, losses.l_inv, losses.l_recon, losses.l_adv, losses.total, seconds)
        metrics.append(row)
        logger.info(
            "epoch %d: l_inv=%.4f l_recon=%.4f l_adv=%.4f total=%.4f",
            epoch,
            row.l_inv,
            row.l_recon,
            row.l_adv,
            row.total,
        )
        if callback is not None:
            callback(row)

    result = TrainResult(params=params, metrics=metrics, initial_params=initial)
    if out_dir is not None:
        out = Path(out_dir)
        try:
            save_config(config, out / CONFIG_FILE)
        except OSError as e:
            raise TrainingError(f"cannot write config {out / CONFIG_FILE}: {e}") from None
        result.checkpoint_path = save_checkpoint(out / CHECKPOINT_FILE, params, config)
        result.metrics_path = write_metrics_csv(out / METRICS_FILE, metrics)
    return result
