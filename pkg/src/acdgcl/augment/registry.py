"""Registry mapping augmentation kinds to operators."""

from __future__ import annotations

from typing import TYPE_CHECKING

from acdgcl.augment.base import AugmentationError, AugmentationKind

if TYPE_CHECKING:
    from acdgcl.augment.base import AugmentationOperator


class AugmentationRegistry:
    """Registry for augmentation operators."""

    def __init__(self) -> None:
        self._operators: dict[AugmentationKind, AugmentationOperator] = {}

    def register(self, operator: AugmentationOperator) -> None:
        """Register an operator under its kind."""
        self._operators[operator.kind] = operator

    def get(self, kind: AugmentationKind | str) -> AugmentationOperator:
        """Get the operator for ``kind``.

        Raises:
            AugmentationError: If no operator is registered for ``kind``.
        """
        try:
            key = AugmentationKind(kind)
        except ValueError:
            key = None
        if key is None or key not in self._operators:
            available = ", ".join(k.value for k in self._operators) or "none"
            raise AugmentationError(f"Augmentation '{kind}' not found. Available: {available}")
        return self._operators[key]

    def kinds(self) -> list[AugmentationKind]:
        return list(self._operators)


# Global registry instance
registry = AugmentationRegistry()
