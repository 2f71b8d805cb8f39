"""Component ablations: drop one reconstruction group or the adversarial term."""

from __future__ import annotations

import csv
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from acdgcl.advtrain import EpochMetrics, TrainingError, train
from acdgcl.config import TrainConfig
from acdgcl.evaluation.probe import EvalReport, evaluate_checkpoint
from acdgcl.graphdata import GraphDataset

logger = logging.getLogger(__name__)

ABLATION_FILE = "ablation.csv"
ABLATION_HEADER = ("variant", "mean", "std", "seed_std")

# Field overrides per variant; "full" trains the configuration as given.
ABLATION_VARIANTS: dict[str, dict[str, Any]] = {
    "full": {},
    "no_intra": {"recon_intra": False},
    "no_inter": {"recon_cross": False},
    "no_adv": {"lambda_a": 0.0},
}


@dataclass
class AblationResult:
    variant: str
    config: TrainConfig
    report: EvalReport
    metrics: dict[int, list[EpochMetrics]] = field(default_factory=dict)


def variant_config(config: TrainConfig, variant: str) -> TrainConfig:
    try:
        overrides = ABLATION_VARIANTS[variant]
    except KeyError:
        raise TrainingError(
            f"unknown ablation variant '{variant}' (expected one of {', '.join(ABLATION_VARIANTS)})"
        ) from None
    return config.with_overrides(**overrides)


def run_ablation(
    config: TrainConfig,
    dataset: GraphDataset,
    out_dir: Path | str | None = None,
    train_seeds: Sequence[int] | None = None,
    variants: Sequence[str] | None = None,
) -> list[AblationResult]:
    """Train and probe every variant under identical seeds.

    Each training seed gives every variant the same initial parameters. The
    probe reports of all training seeds are pooled per variant. With
    ``out_dir`` each run writes to ``<out_dir>/<variant>[/seed-<s>]`` and the
    summary goes to ``<out_dir>/ablation.csv``.
    """
    seeds = list(train_seeds) if train_seeds else [config.seed]
    names = list(variants) if variants else list(ABLATION_VARIANTS)
    out = Path(out_dir) if out_dir is not None else None
    results: list[AblationResult] = []

    for name in names:
        base = variant_config(config, name)
        reports: list[EvalReport] = []
        metrics: dict[int, list[EpochMetrics]] = {}
        for seed in seeds:
            run_config = base.with_overrides(seed=seed)
            run_dir = None
            if out is not None:
                run_dir = out / name if len(seeds) == 1 else out / name / f"seed-{seed}"
            logger.info("ablation %s: training with seed %d", name, seed)
            trained = train(run_config, dataset, out_dir=run_dir)
            metrics[seed] = trained.metrics
            reports.extend(
                _split_by_seed(evaluate_checkpoint(trained.params, dataset, run_config.probe))
            )
        report = EvalReport.combine(reports, base.model_dump(mode="json"))
        results.append(AblationResult(name, base, report, metrics))
        logger.info("ablation %s: %.4f +/- %.4f", name, report.mean, report.std)

    if out is not None:
        write_ablation_csv(out / ABLATION_FILE, results)
    return results


def _split_by_seed(report: EvalReport) -> list[EvalReport]:
    per_seed = [
        report.fold_accuracies[i * report.folds : (i + 1) * report.folds]
        for i in range(len(report.seeds))
    ]
    return [
        EvalReport.from_accuracies([accs], [seed], report.folds)
        for accs, seed in zip(per_seed, report.seeds, strict=True)
    ]


def write_ablation_csv(path: Path | str, results: Sequence[AblationResult]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(ABLATION_HEADER)
            for r in results:
                writer.writerow(
                    [r.variant, repr(r.report.mean), repr(r.report.std), repr(r.report.seed_std)]
                )
    except OSError as e:
        raise TrainingError(f"cannot write ablation summary {path}: {e}") from None
    logger.info("wrote %s", path)
    return path
