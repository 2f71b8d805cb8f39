"""Differentiable primitives over :class:`~acdgcl.diffcore.tensor.Tensor`.

Every primitive validates operand shapes, computes a fresh output, and records
a backward rule on the active tape. Elementwise primitives follow numpy
broadcasting; their gradients are summed back to each operand's shape.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from acdgcl.diffcore.tensor import Array, ShapeError, Tensor, apply_op, as_tensor

Operand = Tensor | ArrayLike


def _unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sum ``grad`` down to ``shape`` (inverse of numpy broadcasting)."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> tuple[int, ...]:
    try:
        return tuple(np.broadcast_shapes(a.shape, b.shape))
    except ValueError:
        raise ShapeError(f"{op}: cannot broadcast shapes {a.shape} and {b.shape}") from None


# -- elementwise binary -------------------------------------------------------


def add(a: Operand, b: Operand) -> Tensor:
    ta, tb = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", ta, tb)
    return apply_op(
        "add",
        lambda x, y: x + y,
        lambda g, out, x, y: (_unbroadcast(g, x.shape), _unbroadcast(g, y.shape)),
        ta,
        tb,
    )


def sub(a: Operand, b: Operand) -> Tensor:
    ta, tb = as_tensor(a), as_tensor(b)
    _broadcast_shape("sub", ta, tb)
    return apply_op(
        "sub",
        lambda x, y: x - y,
        lambda g, out, x, y: (_unbroadcast(g, x.shape), _unbroadcast(-g, y.shape)),
        ta,
        tb,
    )


def mul(a: Operand, b: Operand) -> Tensor:
    ta, tb = as_tensor(a), as_tensor(b)
    _broadcast_shape("mul", ta, tb)
    return apply_op(
        "mul",
        lambda x, y: x * y,
        lambda g, out, x, y: (_unbroadcast(g * y, x.shape), _unbroadcast(g * x, y.shape)),
        ta,
        tb,
    )


def div(a: Operand, b: Operand) -> Tensor:
    ta, tb = as_tensor(a), as_tensor(b)
    _broadcast_shape("div", ta, tb)
    return apply_op(
        "div",
        lambda x, y: x / y,
        lambda g, out, x, y: (
            _unbroadcast(g / y, x.shape),
            _unbroadcast(-g * x / (y * y), y.shape),
        ),
        ta,
        tb,
    )


def scale(a: Operand, factor: float) -> Tensor:
    """Multiply by a Python constant (no gradient to the constant)."""
    c = float(factor)
    return apply_op("scale", lambda x: x * c, lambda g, out, x: (g * c,), a)


def broadcast(a: Operand, shape: Sequence[int]) -> Tensor:
    target = tuple(int(s) for s in shape)
    ta = as_tensor(a)
    try:
        np.broadcast_shapes(ta.shape, target)
    except ValueError:
        raise ShapeError(f"broadcast: cannot broadcast shape {ta.shape} to {target}") from None
    if tuple(np.broadcast_shapes(ta.shape, target)) != target:
        raise ShapeError(f"broadcast: cannot broadcast shape {ta.shape} to {target}")
    return apply_op(
        "broadcast",
        lambda x: np.broadcast_to(x, target).copy(),
        lambda g, out, x: (_unbroadcast(g, x.shape),),
        ta,
    )


# -- elementwise unary --------------------------------------------------------


def relu(a: Operand) -> Tensor:
    return apply_op(
        "relu",
        lambda x: np.maximum(x, 0.0),
        lambda g, out, x: (g * (x > 0.0),),
        a,
    )


def exp(a: Operand) -> Tensor:
    return apply_op("exp", np.exp, lambda g, out, x: (g * out,), a)


def log(a: Operand) -> Tensor:
    return apply_op("log", np.log, lambda g, out, x: (g / x,), a)


def sqrt(a: Operand) -> Tensor:
    return apply_op("sqrt", np.sqrt, lambda g, out, x: (g / (2.0 * out),), a)


# -- reductions ---------------------------------------------------------------


def _expand_reduced(g: Array, shape: tuple[int, ...], axis: int | None, keepdims: bool) -> Array:
    if axis is not None and not keepdims:
        g = np.expand_dims(g, axis)
    return np.broadcast_to(g, shape).copy()


def sum(a: Operand, axis: int | None = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    ta = as_tensor(a)
    if axis is not None and not -ta.ndim <= axis < ta.ndim:
        raise ShapeError(f"sum: axis {axis} out of range for shape {ta.shape}")
    return apply_op(
        "sum",
        lambda x: np.sum(x, axis=axis, keepdims=keepdims),
        lambda g, out, x: (_expand_reduced(g, x.shape, axis, keepdims),),
        ta,
    )


def mean(a: Operand, axis: int | None = None, keepdims: bool = False) -> Tensor:
    ta = as_tensor(a)
    if axis is not None and not -ta.ndim <= axis < ta.ndim:
        raise ShapeError(f"mean: axis {axis} out of range for shape {ta.shape}")
    count = ta.size if axis is None else ta.shape[axis]
    if count == 0:
        raise ShapeError(f"mean: empty reduction over shape {ta.shape}")
    return apply_op(
        "mean",
        lambda x: np.mean(x, axis=axis, keepdims=keepdims),
        lambda g, out, x: (_expand_reduced(g, x.shape, axis, keepdims) / count,),
        ta,
    )


def l2_norm_sq(a: Operand, axis: int | None = None) -> Tensor:
    """Sum of squares, over everything or along ``axis``."""
    return apply_op(
        "l2_norm_sq",
        lambda x: np.sum(x * x, axis=axis),
        lambda g, out, x: (2.0 * x * _expand_reduced(g, x.shape, axis, False),),
        a,
    )


def segment_sum(values: Operand, segment_ids: ArrayLike, num_segments: int) -> Tensor:
    """Sum rows of ``values`` into ``num_segments`` buckets.

    ``segment_ids[i]`` names the bucket of row ``i``; empty buckets are zero.
    """
    tv = as_tensor(values)
    ids: NDArray[np.int64] = np.asarray(segment_ids, dtype=np.int64)
    if tv.ndim == 0 or ids.shape != (tv.shape[0],):
        raise ShapeError(
            f"segment_sum: segment ids shape {ids.shape} does not match values shape {tv.shape}"
        )
    if ids.size and (ids.min() < 0 or ids.max() >= num_segments):
        raise ShapeError(f"segment_sum: segment id out of range [0, {num_segments})")

    def forward(x: Array) -> Array:
        out = np.zeros((num_segments, *x.shape[1:]), dtype=np.float64)
        np.add.at(out, ids, x)
        return out

    return apply_op("segment_sum", forward, lambda g, out, x: (g[ids],), tv)


def take_rows(values: Operand, index: ArrayLike) -> Tensor:
    """Gather rows; the backward rule scatter-adds into the source rows."""
    tv = as_tensor(values)
    idx: NDArray[np.int64] = np.asarray(index, dtype=np.int64)
    if tv.ndim == 0:
        raise ShapeError("take_rows: cannot index a scalar")
    if idx.size and (idx.min() < 0 or idx.max() >= tv.shape[0]):
        raise ShapeError(f"take_rows: index out of range for shape {tv.shape}")

    def backward(g: Array, out: Array, x: Array) -> tuple[Array]:
        grad = np.zeros_like(x)
        np.add.at(grad, idx, g)
        return (grad,)

    return apply_op("take_rows", lambda x: x[idx], backward, tv)


# -- linear algebra and layout ------------------------------------------------


def matmul(a: Operand, b: Operand) -> Tensor:
    ta, tb = as_tensor(a), as_tensor(b)
    if ta.ndim != 2 or tb.ndim != 2 or ta.shape[1] != tb.shape[0]:
        raise ShapeError(f"matmul: shapes {ta.shape} and {tb.shape} do not conform")
    return apply_op(
        "matmul",
        lambda x, y: x @ y,
        lambda g, out, x, y: (g @ y.T, x.T @ g),
        ta,
        tb,
    )


def transpose(a: Operand) -> Tensor:
    ta = as_tensor(a)
    if ta.ndim != 2:
        raise ShapeError(f"transpose: expected a matrix, got shape {ta.shape}")
    return apply_op("transpose", lambda x: x.T.copy(), lambda g, out, x: (g.T.copy(),), ta)


def concat(parts: Sequence[Operand], axis: int = 0) -> Tensor:
    tensors = [as_tensor(p) for p in parts]
    if not tensors:
        raise ShapeError("concat: nothing to concatenate")
    ndim = tensors[0].ndim
    for t in tensors[1:]:
        rest_a = tensors[0].shape[:axis] + tensors[0].shape[axis + 1 :]
        rest_b = t.shape[:axis] + t.shape[axis + 1 :]
        if t.ndim != ndim or rest_a != rest_b:
            raise ShapeError(f"concat: shapes {tensors[0].shape} and {t.shape} do not conform")
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g: Array, out: Array, *xs: Array) -> list[Array]:
        return [piece.copy() for piece in np.split(g, bounds, axis=axis)]

    return apply_op("concat", lambda *xs: np.concatenate(xs, axis=axis), backward, *tensors)


# -- composites ---------------------------------------------------------------


def logsumexp(a: Operand, axis: int = -1) -> Tensor:
    """``log(sum(exp(a)))`` along ``axis`` with max-subtraction.

    The shift is a constant, so it carries no gradient.
    """
    ta = as_tensor(a)
    shift = np.max(ta.data, axis=axis, keepdims=True)
    shifted = exp(sub(ta, shift))
    return add(log(sum(shifted, axis=axis)), np.squeeze(shift, axis=axis))


def neg(a: Operand) -> Tensor:
    return scale(a, -1.0)
