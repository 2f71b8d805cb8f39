"""Named parameter collection for the encoder, extractors and reconstructor.

Parameter names:
    gin.{l}.eps, gin.{l}.w1, gin.{l}.b1, gin.{l}.w2, gin.{l}.b2   for l in 0..L-1
    aug.w1, aug.b1, aug.w2, aug.b2                              g_aug: H -> d -> d
    inv.w1, inv.b1, inv.w2, inv.b2                              g_inv: H -> d -> d
    recon.w1, recon.b1, recon.w2, recon.b2                      g_r:   d -> H -> H
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping

import numpy as np

from acdgcl.config import ModelConfig
from acdgcl.diffcore import GradientMap, Tape, Tensor
from acdgcl.diffcore.tensor import Array
from acdgcl.errors import AcdgclError


class ModelError(AcdgclError):
    """Model shape or parameter error."""


def _mlp_shapes(prefix: str, d_in: int, d_hidden: int, d_out: int) -> list[tuple[str, tuple[int, ...]]]:
    return [
        (f"{prefix}.w1", (d_in, d_hidden)),
        (f"{prefix}.b1", (d_hidden,)),
        (f"{prefix}.w2", (d_hidden, d_out)),
        (f"{prefix}.b2", (d_out,)),
    ]


def parameter_shapes(config: ModelConfig, in_dim: int) -> list[tuple[str, tuple[int, ...]]]:
    """Ordered ``(name, shape)`` list for a model over ``in_dim`` input features."""
    hidden, embed = config.hidden_dim, config.embed_dim
    shapes: list[tuple[str, tuple[int, ...]]] = []
    for layer in range(config.num_layers):
        d_in = in_dim if layer == 0 else hidden
        shapes.append((f"gin.{layer}.eps", (1,)))
        shapes.extend(_mlp_shapes(f"gin.{layer}", d_in, hidden, hidden))
    shapes.extend(_mlp_shapes("aug", hidden, embed, embed))
    shapes.extend(_mlp_shapes("inv", hidden, embed, embed))
    shapes.extend(_mlp_shapes("recon", embed, hidden, hidden))
    return shapes


def param_count(config: ModelConfig, in_dim: int) -> int:
    """Closed-form number of scalar parameters."""
    h, d, layers = config.hidden_dim, config.embed_dim, config.num_layers
    first = 1 + in_dim * h + h + h * h + h
    rest = (layers - 1) * (1 + 2 * (h * h + h))
    extractors = 2 * (h * d + d + d * d + d)
    reconstructor = d * h + h + h * h + h
    return first + rest + extractors + reconstructor


class ModelParams(Mapping[str, Array]):
    """Immutable mapping from parameter name to float64 array."""

    def __init__(self, values: Mapping[str, Array], config: ModelConfig, in_dim: int) -> None:
        expected = parameter_shapes(config, in_dim)
        if set(values) != {name for name, _ in expected}:
            missing = sorted({n for n, _ in expected} - set(values))
            extra = sorted(set(values) - {n for n, _ in expected})
            raise ModelError(f"parameter names do not match config (missing {missing}, extra {extra})")
        self._values: dict[str, Array] = {}
        for name, shape in expected:
            array = np.array(values[name], dtype=np.float64)
            if array.shape != shape:
                raise ModelError(f"{name}: shape {array.shape}, expected {shape}")
            if not np.all(np.isfinite(array)):
                raise ModelError(f"{name}: non-finite values")
            array.setflags(write=False)
            self._values[name] = array
        self.config = config
        self.in_dim = in_dim

    def __getitem__(self, name: str) -> Array:
        return self._values[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def names(self) -> list[str]:
        return list(self._values)

    def count(self) -> int:
        return sum(int(v.size) for v in self._values.values())

    def tensors(self, tape: Tape | None = None) -> dict[str, Tensor]:
        """Parameters as tensors: tape leaves when ``tape`` is given, constants otherwise."""
        if tape is None:
            return {name: Tensor(value, name=name) for name, value in self._values.items()}
        return {name: tape.leaf(name, value) for name, value in self._values.items()}

    def replace(self, values: Mapping[str, Array]) -> ModelParams:
        merged = dict(self._values)
        merged.update(values)
        return ModelParams(merged, self.config, self.in_dim)

    def copy(self) -> ModelParams:
        return ModelParams(self._values, self.config, self.in_dim)

    def equals(self, other: ModelParams) -> bool:
        """Bitwise equality of every parameter."""
        return self.names() == other.names() and all(
            np.array_equal(self[n], other[n]) for n in self.names()
        )

    def check_gradients(self, grads: GradientMap) -> None:
        for name, value in self._values.items():
            if name not in grads:
                raise ModelError(f"missing gradient for {name}")
            if grads[name].shape != value.shape:
                raise ModelError(
                    f"gradient for {name} has shape {grads[name].shape}, expected {value.shape}"
                )


def init_params(config: ModelConfig, in_dim: int, rng: np.random.Generator) -> ModelParams:
    """Glorot-uniform weights, zero biases and zero GIN epsilons.

    Weights are drawn in the fixed name order of :func:`parameter_shapes`, so
    one seed always yields the same parameters.
    """
    if in_dim < 1:
        raise ModelError(f"input dimension must be positive, got {in_dim}")
    values: dict[str, Array] = {}
    for name, shape in parameter_shapes(config, in_dim):
        if len(shape) == 2:
            fan_in, fan_out = shape
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            values[name] = rng.uniform(-limit, limit, size=shape)
        else:
            values[name] = np.zeros(shape, dtype=np.float64)
    return ModelParams(values, config, in_dim)
