"""Configuration management for acdgcl.

A training configuration is a JSON (or TOML) document mirroring
:class:`TrainConfig`. Every section is optional and falls back to the defaults
below; unknown keys are rejected.

Example config file (JSON):
    {
        "epochs": 100,
        "batch_size": 32,
        "lambda_r": 5.0,
        "lambda_a": 0.5,
        "pgd": {"epsilon": 0.01, "steps": 3},
        "augmentations": [
            {"kind": "node_drop", "ratio": 0.2},
            {"kind": "subgraph", "ratio": 0.8}
        ],
        "model": {"num_layers": 3, "hidden_dim": 32, "embed_dim": 32},
        "probe": {"folds": 10, "seeds": [0, 1, 2, 3, 4]}
    }
"""

from __future__ import annotations

import json
import os
import tomllib
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from acdgcl.augment import AugmentationKind, AugmentationSpec
from acdgcl.errors import AcdgclError

DATA_DIR_ENV = "ACDGCL_DATA_DIR"


class ConfigError(AcdgclError):
    """Configuration could not be loaded or validated."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PgdInit(str, Enum):
    """Starting point of the inner maximisation."""

    ZERO = "zero"
    UNIFORM = "uniform"


class ModelConfig(_Strict):
    """Encoder and head dimensions."""

    num_layers: int = Field(default=3, ge=1)
    hidden_dim: int = Field(default=32, ge=1)
    embed_dim: int = Field(default=32, ge=1)


class PgdConfig(_Strict):
    """Projected gradient ascent on the first-hidden-layer perturbation."""

    epsilon: float = Field(default=0.01, ge=0.0)
    steps: int = Field(default=3, ge=0)
    step_size: float | None = None
    init: PgdInit = PgdInit.ZERO

    @model_validator(mode="after")
    def _positive_step(self) -> PgdConfig:
        if self.step_size is not None and self.step_size <= 0:
            raise ValueError("step_size must be positive")
        return self

    @property
    def effective_step_size(self) -> float:
        """Explicit step size, else ``2.5 * epsilon / steps``."""
        if self.step_size is not None:
            return self.step_size
        if self.steps == 0:
            return 0.0
        return 2.5 * self.epsilon / self.steps


class ProbeConfig(_Strict):
    """Linear-probe evaluation protocol."""

    l2: float = Field(default=1e-3, ge=0.0)
    epochs: int = Field(default=300, ge=0)
    learning_rate: float = Field(default=0.5, gt=0.0)
    folds: int = Field(default=10, ge=2)
    seeds: list[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4], min_length=1)
    standardize: bool = True


def _default_family() -> list[AugmentationSpec]:
    return [
        AugmentationSpec(kind=AugmentationKind.NODE_DROP, ratio=0.2),
        AugmentationSpec(kind=AugmentationKind.EDGE_PERTURB, ratio=0.2),
        AugmentationSpec(kind=AugmentationKind.ATTRIBUTE_MASK, ratio=0.2),
        AugmentationSpec(kind=AugmentationKind.SUBGRAPH, ratio=0.8),
    ]


class TrainConfig(_Strict):
    """All hyperparameters of one training run."""

    epochs: int = Field(default=100, ge=0)
    batch_size: int = Field(default=32, ge=2)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    temperature: float = Field(default=0.2, gt=0.0)
    lambda_r: float = Field(default=5.0, ge=0.0)
    lambda_a: float = Field(default=0.5, ge=0.0)
    pgd: PgdConfig = Field(default_factory=PgdConfig)
    augmentations: list[AugmentationSpec] = Field(default_factory=_default_family, min_length=1)
    model: ModelConfig = Field(default_factory=ModelConfig)
    seed: int = 0
    recon_intra: bool = True
    recon_cross: bool = True
    record_wall_time: bool = False
    probe: ProbeConfig = Field(default_factory=ProbeConfig)

    def with_overrides(self, **changes: Any) -> TrainConfig:
        """Validated copy with top-level fields replaced."""
        data = self.model_dump()
        data.update(changes)
        return TrainConfig.model_validate(data)


def get_default_config() -> TrainConfig:
    """Get the default training configuration."""
    return TrainConfig()


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{where}: {item['msg']}")
    return "; ".join(parts)


def parse_config(data: dict[str, Any]) -> TrainConfig:
    """Validate a raw mapping into a :class:`TrainConfig`.

    Raises:
        ConfigError: On unknown keys or out-of-range values.
    """
    try:
        return TrainConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {_describe(e)}") from None


def load_config(config_path: Path | str | None = None) -> TrainConfig:
    """Load a configuration file.

    ``.toml`` files are read with tomllib, anything else as JSON. ``None``
    returns the defaults.

    Raises:
        ConfigError: If the file is missing, unreadable, or invalid.
    """
    if config_path is None:
        return get_default_config()
    path = Path(config_path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.suffix == ".toml":
            with path.open("rb") as f:
                data = tomllib.load(f)
        else:
            data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold an object at the top level")
    return parse_config(data)


def save_config(config: TrainConfig, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def resolve_data_dir(data: Path | str | None) -> Path:
    """Explicit ``--data`` wins, then ``ACDGCL_DATA_DIR``.

    Raises:
        ConfigError: If neither is set.
    """
    if data is not None:
        return Path(data).expanduser()
    env = os.environ.get(DATA_DIR_ENV)
    if env:
        return Path(env).expanduser()
    raise ConfigError(f"no dataset given: pass --data or set {DATA_DIR_ENV}")
