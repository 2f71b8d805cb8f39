"""Stochastic graph augmentations for contrastive views."""

from acdgcl.augment.base import (
    AugmentationError,
    AugmentationKind,
    AugmentationOperator,
    AugmentationSpec,
    ViewPair,
)
from acdgcl.augment.operators import (
    AttributeMask,
    EdgePerturb,
    NodeDrop,
    SubgraphSample,
    attribute_mask,
    edge_perturb,
    node_drop,
    subgraph_sample,
)
from acdgcl.augment.registry import AugmentationRegistry, registry
from acdgcl.augment.views import apply_augmentation, sample_view_pair, scale_family

# Register all operators
registry.register(NodeDrop())
registry.register(EdgePerturb())
registry.register(AttributeMask())
registry.register(SubgraphSample())

__all__ = [
    "AttributeMask",
    "AugmentationError",
    "AugmentationKind",
    "AugmentationOperator",
    "AugmentationRegistry",
    "AugmentationSpec",
    "EdgePerturb",
    "NodeDrop",
    "SubgraphSample",
    "ViewPair",
    "apply_augmentation",
    "attribute_mask",
    "edge_perturb",
    "node_drop",
    "registry",
    "sample_view_pair",
    "scale_family",
]
