"""Tensors, the recording tape, and reverse-mode accumulation.

A :class:`Tensor` is an immutable float64 array. Primitive operations (see
``acdgcl.diffcore.ops``) produce fresh tensors and, while a :class:`Tape` is
active, append an entry describing how to recompute the output and how to map
an output gradient back to the inputs. :func:`backward` walks the tape in
reverse and returns a :data:`GradientMap` keyed by leaf name.

Example:
    with Tape() as tape:
        x = tape.leaf("x", [1.0, 2.0, 3.0])
        loss = ops.sum(x)
    grads = backward(tape, loss)   # {"x": array([1., 1., 1.])}
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterator, Mapping, Sequence
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from acdgcl.errors import AcdgclError

Array = NDArray[np.float64]
GradientMap = dict[str, Array]

ForwardFn = Callable[..., Array]
BackwardFn = Callable[..., Sequence[Array | None]]

_ids = itertools.count()
_active_tape: ContextVar[Tape | None] = ContextVar("acdgcl_active_tape", default=None)


class DiffError(AcdgclError):
    """Differentiation layer error."""


class ShapeError(DiffError):
    """Operand shapes do not conform."""


class NonFiniteError(DiffError):
    """An operation produced NaN or Inf."""


class TapeError(DiffError):
    """Misuse of a tape (non-scalar loss, loss recorded elsewhere, re-entry)."""


def _freeze(value: ArrayLike) -> Array:
    array = np.array(value, dtype=np.float64)
    array.setflags(write=False)
    return array


class Tensor:
    """Immutable dense float64 tensor.

    Attributes:
        data: Read-only row-major array of values.
        name: Leaf name when the tensor was registered with :meth:`Tape.leaf`.
    """

    __slots__ = ("data", "id", "name")

    def __init__(self, value: ArrayLike, name: str | None = None) -> None:
        self.data: Array = _freeze(value)
        if not np.all(np.isfinite(self.data)):
            raise NonFiniteError(f"non-finite value in tensor {name or '<anonymous>'}")
        self.id: int = next(_ids)
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(()))

    def numpy(self) -> Array:
        return self.data

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<Tensor{label} shape={self.shape}>"


def as_tensor(value: Tensor | ArrayLike) -> Tensor:
    """Wrap constants so primitives accept plain numbers and arrays."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


@dataclass(frozen=True)
class TapeEntry:
    """One recorded primitive application."""

    op: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    forward: ForwardFn
    backward: BackwardFn


class Tape:
    """Ordered record of primitive operations.

    Entries are appended as operations execute, so every entry's inputs were
    produced earlier on the tape (or are leaves/constants). A tape belongs to
    the context (thread) that entered it. Tapes nest: entering a tape suspends
    recording on the enclosing one until the inner tape exits.
    """

    def __init__(self) -> None:
        self.entries: list[TapeEntry] = []
        self.leaves: dict[str, Tensor] = {}
        self._outputs: set[int] = set()
        self._token: Any = None

    def __enter__(self) -> Tape:
        if self._token is not None:
            raise TapeError("tape entered twice")
        self._token = _active_tape.set(self)
        return self

    def __exit__(self, exc_type: type | None, exc_val: BaseException | None, exc_tb: object) -> None:
        _active_tape.reset(self._token)
        self._token = None

    def leaf(self, name: str, value: Tensor | ArrayLike) -> Tensor:
        """Register a named differentiable input."""
        if name in self.leaves:
            raise TapeError(f"leaf '{name}' registered twice")
        data = value.data if isinstance(value, Tensor) else value
        tensor = Tensor(data, name=name)
        self.leaves[name] = tensor
        return tensor

    def record(self, entry: TapeEntry) -> None:
        self.entries.append(entry)
        self._outputs.add(entry.output.id)

    def contains(self, tensor: Tensor) -> bool:
        return tensor.id in self._outputs or any(
            leaf.id == tensor.id for leaf in self.leaves.values()
        )

    def replay(self, overrides: Mapping[str, ArrayLike] | None = None) -> dict[int, Array]:
        """Recompute every recorded output from the leaves.

        Args:
            overrides: Optional replacement values for named leaves.

        Returns:
            Mapping from original tensor id to recomputed value. With no
            overrides the values are bit-identical to the recorded ones.
        """
        values: dict[int, Array] = {}
        overrides = overrides or {}
        for name, leaf in self.leaves.items():
            values[leaf.id] = _freeze(overrides[name]) if name in overrides else leaf.data
        for entry in self.entries:
            args = [values.get(t.id, t.data) for t in entry.inputs]
            values[entry.output.id] = _freeze(entry.forward(*args))
        return values


def active_tape() -> Tape | None:
    return _active_tape.get()


@contextmanager
def no_tape() -> Iterator[None]:
    """Evaluate primitives without recording on any enclosing tape."""
    token = _active_tape.set(None)
    try:
        yield
    finally:
        _active_tape.reset(token)


def apply_op(name: str, forward: ForwardFn, backward: BackwardFn, *inputs: Tensor | ArrayLike) -> Tensor:
    """Run a primitive and record it on the active tape.

    Args:
        name: Operation name used in error messages.
        forward: ``forward(*input_arrays) -> array``.
        backward: ``backward(grad_out, output_array, *input_arrays)`` returning one
            gradient (or ``None`` for a non-differentiable input) per input.
        *inputs: Operands; non-tensors are wrapped as constants.

    Raises:
        NonFiniteError: If the result contains NaN or Inf.
    """
    tensors = tuple(as_tensor(x) for x in inputs)
    with np.errstate(all="ignore"):
        value = forward(*(t.data for t in tensors))
    if not np.all(np.isfinite(value)):
        shapes = ", ".join(str(t.shape) for t in tensors)
        raise NonFiniteError(f"{name} produced a non-finite value (operand shapes {shapes})")
    output = Tensor(value)
    tape = _active_tape.get()
    if tape is not None:
        tape.record(TapeEntry(name, tensors, output, forward, backward))
    return output


def backward(tape: Tape, loss: Tensor, wrt: Sequence[str] | None = None) -> GradientMap:
    """Reverse-mode gradient of a scalar loss with respect to the tape's leaves.

    Gradients reaching a tensor from several consumers are summed. Leaves the
    loss does not depend on get zero gradients.

    Raises:
        TapeError: If ``loss`` is not a scalar or was not produced on ``tape``.
    """
    if loss.size != 1:
        raise TapeError(f"loss must be a scalar, got shape {loss.shape}")
    if not tape.contains(loss):
        raise TapeError("loss was not recorded on this tape")

    names = list(wrt) if wrt is not None else list(tape.leaves)
    missing = [n for n in names if n not in tape.leaves]
    if missing:
        raise TapeError(f"unknown leaves requested: {', '.join(missing)}")

    grads: dict[int, Array] = {loss.id: np.ones_like(loss.data)}
    for entry in reversed(tape.entries):
        grad_out = grads.pop(entry.output.id, None)
        if grad_out is None:
            continue
        input_grads = entry.backward(grad_out, entry.output.data, *(t.data for t in entry.inputs))
        for tensor, grad in zip(entry.inputs, input_grads, strict=True):
            if grad is None:
                continue
            if grad.shape != tensor.shape:
                raise ShapeError(
                    f"{entry.op} backward returned shape {grad.shape} for input shape {tensor.shape}"
                )
            if tensor.id in grads:
                grads[tensor.id] = grads[tensor.id] + grad
            else:
                grads[tensor.id] = grad

    result: GradientMap = {}
    for name in names:
        leaf = tape.leaves[name]
        result[name] = np.array(grads.get(leaf.id, np.zeros_like(leaf.data)), dtype=np.float64)
    return result
