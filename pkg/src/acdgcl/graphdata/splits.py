"""Deterministic k-fold splits."""

from __future__ import annotations

import numpy as np

from acdgcl.errors import AcdgclError
from acdgcl.graphdata.models import FoldSplit


class SplitError(AcdgclError):
    """Invalid fold request."""


def kfold_split(n: int, k: int, seed: int) -> FoldSplit:
    """Shuffle ``range(n)`` with a seeded generator and deal it round-robin into ``k`` folds.

    Fold sizes differ by at most one. The result depends only on ``(n, k, seed)``.
    """
    if k < 2:
        raise SplitError(f"need at least 2 folds, got {k}")
    if n < k:
        raise SplitError(f"cannot split {n} items into {k} folds")
    order = np.random.default_rng(seed).permutation(n)
    return FoldSplit(folds=tuple(order[i::k] for i in range(k)), n=n, seed=seed)
