"""Robustness sweeps: probe accuracy as one knob is turned."""

from __future__ import annotations

import csv
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from acdgcl.advtrain import train
from acdgcl.augment import AugmentationError, AugmentationKind, AugmentationSpec, scale_family
from acdgcl.config import ConfigError, TrainConfig
from acdgcl.evaluation.embed import embed_dataset
from acdgcl.evaluation.errors import SweepError
from acdgcl.evaluation.probe import EvalReport, evaluate_checkpoint, evaluate_table
from acdgcl.graphdata import GraphDataset
from acdgcl.model import ModelParams

logger = logging.getLogger(__name__)

SWEEP_HEADER = ("axis", "value", "mean", "std", "seed_std")


class SweepAxis(str, Enum):
    """What a sweep varies."""

    AUG_RATIO = "aug_ratio"
    EPSILON = "epsilon"
    ATTACK_STEPS = "attack_steps"
    EDGE_PERTURB = "edge_perturb"
    ATTRIBUTE_MASK = "attribute_mask"

    @property
    def is_augmentation(self) -> bool:
        return self in (SweepAxis.AUG_RATIO, SweepAxis.EDGE_PERTURB, SweepAxis.ATTRIBUTE_MASK)


@dataclass(frozen=True)
class SweepRow:
    axis: SweepAxis
    value: float
    report: EvalReport

    def to_row(self) -> list[str]:
        return [
            self.axis.value,
            repr(float(self.value)),
            repr(self.report.mean),
            repr(self.report.std),
            repr(self.report.seed_std),
        ]


def parse_axis(name: str | SweepAxis) -> SweepAxis:
    try:
        return SweepAxis(name)
    except ValueError:
        choices = ", ".join(a.value for a in SweepAxis)
        raise SweepError(f"unknown sweep axis '{name}' (expected one of {choices})") from None


def parse_values(text: str) -> list[float]:
    """Parse ``"0.1,0.2,0.3"``.

    Raises:
        SweepError: If the list is empty or an entry is not a number.
    """
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise SweepError("no sweep values given")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise SweepError(f"sweep values must be numbers, got '{text}'") from None


def config_for(config: TrainConfig, axis: SweepAxis, value: float) -> TrainConfig:
    """Copy of ``config`` with the swept setting replaced by ``value``.

    Raises:
        SweepError: If ``value`` is not valid for ``axis``.
    """
    try:
        if axis is SweepAxis.AUG_RATIO:
            return config.with_overrides(augmentations=scale_family(config.augmentations, value))
        if axis is SweepAxis.EDGE_PERTURB:
            return config.with_overrides(
                augmentations=[AugmentationSpec(kind=AugmentationKind.EDGE_PERTURB, ratio=value)]
            )
        if axis is SweepAxis.ATTRIBUTE_MASK:
            return config.with_overrides(
                augmentations=[AugmentationSpec(kind=AugmentationKind.ATTRIBUTE_MASK, ratio=value)]
            )
        if axis is SweepAxis.EPSILON:
            pgd = config.pgd.model_copy(update={"epsilon": value})
            return config.with_overrides(pgd=pgd.model_dump())
        if value < 0 or value != int(value):
            raise SweepError(f"attack_steps must be a non-negative integer, got {value}")
        pgd = config.pgd.model_copy(update={"steps": int(value)})
        return config.with_overrides(pgd=pgd.model_dump())
    except (ValueError, ConfigError, AugmentationError) as e:
        raise SweepError(f"{axis.value}={value} is not a valid setting: {e}") from None


def run_robustness_sweep(
    config: TrainConfig,
    dataset: GraphDataset,
    axis: SweepAxis | str,
    values: Sequence[float],
    reevaluate: bool = False,
    out_path: Path | str | None = None,
) -> list[SweepRow]:
    """Probe accuracy for each value of ``axis``, rows sorted by value.

    By default every value retrains from ``config``. With ``reevaluate`` the
    model is trained once and each value only changes the embedding inputs:
    augmented graphs for augmentation axes, a PGD-perturbed first hidden
    layer for ``epsilon`` and ``attack_steps``.

    Raises:
        SweepError: On an unknown axis, no values, or an invalid value.
    """
    sweep_axis = parse_axis(axis)
    if not values:
        raise SweepError("no sweep values given")
    ordered = sorted(float(v) for v in values)
    settings = [(v, config_for(config, sweep_axis, v)) for v in ordered]

    rows: list[SweepRow] = []
    if reevaluate:
        params = train(config, dataset).params
        for value, cfg in settings:
            rows.append(SweepRow(sweep_axis, value, _reevaluate(params, dataset, cfg, sweep_axis)))
            logger.info("sweep %s=%g: %.4f", sweep_axis.value, value, rows[-1].report.mean)
    else:
        for value, cfg in settings:
            params = train(cfg, dataset).params
            report = evaluate_checkpoint(params, dataset, cfg.probe, cfg.model_dump(mode="json"))
            rows.append(SweepRow(sweep_axis, value, report))
            logger.info("sweep %s=%g: %.4f", sweep_axis.value, value, report.mean)

    if out_path is not None:
        write_sweep_csv(out_path, rows)
    return rows


def _reevaluate(
    params: ModelParams, dataset: GraphDataset, cfg: TrainConfig, axis: SweepAxis
) -> EvalReport:
    rng = np.random.default_rng(cfg.seed)
    if axis.is_augmentation:
        table = embed_dataset(params, dataset, family=cfg.augmentations, rng=rng)
    else:
        table = embed_dataset(params, dataset, pgd=cfg.pgd, temperature=cfg.temperature, rng=rng)
    return evaluate_table(table, cfg.probe, dataset.num_graph_classes, cfg.model_dump(mode="json"))


def write_sweep_csv(path: Path | str, rows: Sequence[SweepRow]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(SWEEP_HEADER)
            writer.writerows(row.to_row() for row in rows)
    except OSError as e:
        raise SweepError(f"cannot write sweep results {path}: {e}") from None
    logger.info("wrote %s", path)
    return path
