"""Training errors."""

from acdgcl.errors import AcdgclError


class TrainingError(AcdgclError):
    """Training cannot proceed (bad batch size, empty dataset, I/O failure)."""
