"""Evaluation errors."""

from acdgcl.errors import AcdgclError


class ProbeError(AcdgclError):
    """Embedding or linear-probe evaluation failed."""


class SweepError(AcdgclError):
    """Robustness sweep request is invalid."""
