"""Per-epoch loss rows and their CSV form."""

from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import astuple, dataclass
from pathlib import Path

from acdgcl.advtrain.errors import TrainingError

METRICS_HEADER = ("epoch", "l_inv", "l_recon", "l_adv", "total", "seconds")


@dataclass(frozen=True)
class EpochMetrics:
    """Mean batch losses of one epoch.

    ``seconds`` is wall time when timing is enabled and 0.0 otherwise, so
    repeated runs produce identical files.
    """

    epoch: int
    l_inv: float
    l_recon: float
    l_adv: float
    total: float
    seconds: float = 0.0

    def to_row(self) -> list[str]:
        return [str(self.epoch)] + [repr(float(x)) for x in astuple(self)[1:]]

    @classmethod
    def from_row(cls, row: Sequence[str]) -> EpochMetrics:
        epoch, *values = row
        return cls(int(epoch), *(float(v) for v in values))


def write_metrics_csv(path: Path | str, rows: Sequence[EpochMetrics]) -> Path:
    """Write rows under the fixed header.

    Raises:
        TrainingError: If the file cannot be written.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(METRICS_HEADER)
            writer.writerows(row.to_row() for row in rows)
    except OSError as e:
        raise TrainingError(f"cannot write metrics {path}: {e}") from None
    return path


def read_metrics_csv(path: Path | str) -> list[EpochMetrics]:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None or tuple(header) != METRICS_HEADER:
                raise TrainingError(f"{path}: unexpected metrics header {header}")
            return [EpochMetrics.from_row(row) for row in reader if row]
    except OSError as e:
        raise TrainingError(f"cannot read metrics {path}: {e}") from None
