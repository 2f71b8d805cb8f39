"""Augmentation operator interface and shared types."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from acdgcl.errors import AcdgclError
from acdgcl.graphdata import Graph, GraphView


class AugmentationError(AcdgclError):
    """Invalid augmentation request."""


class AugmentationKind(str, Enum):
    """Supported stochastic graph transformations."""

    NODE_DROP = "node_drop"
    EDGE_PERTURB = "edge_perturb"
    ATTRIBUTE_MASK = "attribute_mask"
    SUBGRAPH = "subgraph"


class AugmentationSpec(BaseModel):
    """One member of an augmentation family.

    For ``subgraph`` the ratio is the fraction of nodes kept; for every other
    kind it is the fraction of nodes or edges affected.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: AugmentationKind
    ratio: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _subgraph_keeps_nodes(self) -> AugmentationSpec:
        if self.kind is AugmentationKind.SUBGRAPH and self.ratio == 0.0:
            raise ValueError("subgraph ratio is the fraction of nodes kept and must be positive")
        return self


@dataclass(frozen=True)
class ViewPair:
    """Two independently augmented views of one source graph."""

    view1: GraphView
    view2: GraphView
    spec1: AugmentationSpec
    spec2: AugmentationSpec


def check_ratio(ratio: float) -> None:
    if not 0.0 <= ratio <= 1.0 or math.isnan(ratio):
        raise AugmentationError(f"ratio must lie in [0, 1], got {ratio}")


def floor_count(ratio: float, total: int) -> int:
    """``floor(ratio * total)``, tolerant of float noise like ``0.29 * 100``."""
    return int(math.floor(ratio * total + 1e-9))


def ceil_count(ratio: float, total: int) -> int:
    return int(math.ceil(ratio * total - 1e-9))


class AugmentationOperator(ABC):
    """Base class for all augmentation operators."""

    @property
    @abstractmethod
    def kind(self) -> AugmentationKind:
        """Operator identifier."""
        ...

    @abstractmethod
    def apply(self, graph: Graph, ratio: float, rng: np.random.Generator) -> GraphView:
        """Transform ``graph``; pure in ``(graph, ratio, rng state)``."""
        ...

    def identity_ratio(self) -> float:
        """Ratio at which the operator leaves the graph unchanged."""
        return 0.0
