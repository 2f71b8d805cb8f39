"""Sampling contrastive view pairs from an augmentation family."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from acdgcl.augment.base import (
    AugmentationError,
    AugmentationKind,
    AugmentationSpec,
    ViewPair,
    check_ratio,
)
from acdgcl.augment.registry import registry
from acdgcl.graphdata import Graph, GraphView


def apply_augmentation(graph: Graph, spec: AugmentationSpec, rng: np.random.Generator) -> GraphView:
    """Apply one family member through the operator registry."""
    return registry.get(spec.kind).apply(graph, spec.ratio, rng)


def sample_view_pair(
    graph: Graph,
    family: Sequence[AugmentationSpec],
    rng: np.random.Generator,
) -> ViewPair:
    """Draw two family members independently and apply each to ``graph``.

    Raises:
        AugmentationError: If the family is empty.
    """
    if not family:
        raise AugmentationError("augmentation family is empty")
    spec1 = family[int(rng.integers(len(family)))]
    view1 = apply_augmentation(graph, spec1, rng)
    spec2 = family[int(rng.integers(len(family)))]
    view2 = apply_augmentation(graph, spec2, rng)
    return ViewPair(view1=view1, view2=view2, spec1=spec1, spec2=spec2)


def scale_family(family: Sequence[AugmentationSpec], strength: float) -> list[AugmentationSpec]:
    """Set every member's strength; subgraph keeps ``1 - strength`` of the nodes.

    Raises:
        AugmentationError: If ``strength`` is outside ``[0, 1]``, or is 1 while
            the family holds a subgraph member (which would keep no nodes).
    """
    check_ratio(strength)
    scaled = []
    for spec in family:
        if spec.kind is AugmentationKind.SUBGRAPH:
            if strength == 1.0:
                raise AugmentationError("strength 1 leaves subgraph sampling no nodes to keep")
            scaled.append(AugmentationSpec(kind=spec.kind, ratio=1.0 - strength))
        else:
            scaled.append(AugmentationSpec(kind=spec.kind, ratio=strength))
    return scaled
