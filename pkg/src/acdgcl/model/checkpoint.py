"""Checkpoint document: parameters plus the configuration that produced them.

Format (JSON):
    {
      "format_version": 1,
      "in_dim": 7,
      "config": {...TrainConfig...},
      "params": {"aug.b1": {"shape": [32], "values": [...]}, ...}
    }

Parameter names are written in sorted order, so identical parameters and
configuration always give identical bytes.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from acdgcl.config import TrainConfig
from acdgcl.errors import AcdgclError
from acdgcl.model.params import ModelError, ModelParams

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 1


class CheckpointError(AcdgclError):
    """Checkpoint could not be written, read, or interpreted."""


class ParamEntry(BaseModel):
    """One parameter tensor in row-major order."""

    shape: list[int]
    values: list[float]


class Checkpoint(BaseModel):
    """Serialized model state."""

    format_version: int = CHECKPOINT_FORMAT_VERSION
    in_dim: int
    config: dict[str, Any] = Field(default_factory=dict)
    params: dict[str, ParamEntry] = Field(default_factory=dict)

    @classmethod
    def from_params(cls, params: ModelParams, config: TrainConfig) -> Checkpoint:
        entries = {
            name: ParamEntry(shape=list(params[name].shape), values=params[name].ravel().tolist())
            for name in sorted(params.names())
        }
        return cls(in_dim=params.in_dim, config=config.model_dump(mode="json"), params=entries)

    def train_config(self) -> TrainConfig:
        return TrainConfig.model_validate(self.config)

    def to_params(self) -> ModelParams:
        try:
            config = self.train_config()
            values = {
                name: np.array(entry.values, dtype=np.float64).reshape(entry.shape)
                for name, entry in self.params.items()
            }
            return ModelParams(values, config.model, self.in_dim)
        except (ValidationError, ValueError, ModelError) as e:
            raise CheckpointError(f"checkpoint does not describe a valid model: {e}") from None


def save_checkpoint(path: Path | str, params: ModelParams, config: TrainConfig) -> Path:
    """Write a checkpoint.

    Raises:
        CheckpointError: On I/O failure, naming the path.
    """
    path = Path(path)
    document = Checkpoint.from_params(params, config).model_dump_json(indent=2)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(document + "\n", encoding="utf-8")
    except OSError as e:
        raise CheckpointError(f"cannot write checkpoint {path}: {e}") from None
    logger.info("wrote checkpoint %s (%d parameters)", path, params.count())
    return path


def load_checkpoint(path: Path | str) -> Checkpoint:
    """Read and validate a checkpoint document.

    Raises:
        CheckpointError: If the file is missing, malformed, or of another format version.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from None
    try:
        checkpoint = Checkpoint.model_validate_json(text)
    except ValidationError as e:
        raise CheckpointError(f"malformed checkpoint {path}: {e.error_count()} error(s)") from None
    if checkpoint.format_version != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: format version {checkpoint.format_version}, "
            f"expected {CHECKPOINT_FORMAT_VERSION}"
        )
    return checkpoint
