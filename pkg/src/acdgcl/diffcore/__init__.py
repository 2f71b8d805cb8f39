"""Dense float64 tensors with tape-based reverse-mode differentiation."""

from acdgcl.diffcore import ops
from acdgcl.diffcore.gradcheck import GradCheckError, GradCheckReport, finite_diff_check
from acdgcl.diffcore.tensor import (
    DiffError,
    GradientMap,
    NonFiniteError,
    ShapeError,
    Tape,
    TapeEntry,
    TapeError,
    Tensor,
    active_tape,
    apply_op,
    as_tensor,
    backward,
    no_tape,
)

__all__ = [
    "DiffError",
    "GradCheckError",
    "GradCheckReport",
    "GradientMap",
    "NonFiniteError",
    "ShapeError",
    "Tape",
    "TapeEntry",
    "TapeError",
    "Tensor",
    "active_tape",
    "apply_op",
    "as_tensor",
    "backward",
    "finite_diff_check",
    "no_tape",
    "ops",
]
