"""GIN encoder, disentangling extractors and cross-view reconstructor.

All functions take parameters as named tensors (from
:meth:`ModelParams.tensors`) so the same code serves taped training passes
and tape-free evaluation.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from acdgcl.diffcore import Tensor, ops
from acdgcl.graphdata import GraphBatch
from acdgcl.model.params import ModelError, ModelParams

ParamTensors = Mapping[str, Tensor]


@dataclass(frozen=True)
class EncoderOutput:
    """First-layer node embeddings (before any perturbation) and graph embeddings."""

    hidden1: Tensor
    z: Tensor


@dataclass(frozen=True)
class DisentangledPair:
    """Augmentation-dependent and augmentation-invariant graph embeddings."""

    z_aug: Tensor
    z_inv: Tensor


def as_tensors(params: ModelParams | ParamTensors) -> ParamTensors:
    if isinstance(params, ModelParams):
        return params.tensors()
    return params


def mlp(x: Tensor, params: ParamTensors, prefix: str) -> Tensor:
    """Linear -> relu -> linear."""
    h = ops.relu(ops.add(ops.matmul(x, params[f"{prefix}.w1"]), params[f"{prefix}.b1"]))
    return ops.add(ops.matmul(h, params[f"{prefix}.w2"]), params[f"{prefix}.b2"])


def num_layers(params: ParamTensors) -> int:
    return sum(1 for name in params if name.startswith("gin.") and name.endswith(".eps"))


def gin_layer(batch: GraphBatch, h: Tensor, params: ParamTensors, layer: int) -> Tensor:
    """``MLP((1 + eps) * h_v + sum of neighbour rows)`` for every node."""
    src, dst = batch.edge_index[0], batch.edge_index[1]
    messages = ops.segment_sum(ops.take_rows(h, src), dst, batch.num_nodes)
    self_term = ops.mul(h, ops.add(1.0, params[f"gin.{layer}.eps"]))
    return mlp(ops.add(self_term, messages), params, f"gin.{layer}")


def encode_first_layer(batch: GraphBatch, params: ModelParams | ParamTensors) -> Tensor:
    tensors = as_tensors(params)
    return gin_layer(batch, batch.node_features, tensors, 0)


def encode_from_hidden(
    batch: GraphBatch,
    hidden1: Tensor,
    params: ModelParams | ParamTensors,
    delta: Tensor | None = None,
) -> Tensor:
    """Continue the encoder from first-layer embeddings, optionally perturbed.

    Raises:
        ModelError: If ``delta`` does not match ``hidden1``'s shape.
    """
    tensors = as_tensors(params)
    h = hidden1
    if delta is not None:
        if delta.shape != hidden1.shape:
            raise ModelError(f"delta shape {delta.shape} does not match hidden1 {hidden1.shape}")
        h = ops.add(h, delta)
    for layer in range(1, num_layers(tensors)):
        h = gin_layer(batch, h, tensors, layer)
    return ops.segment_sum(h, batch.segment_ids, batch.num_graphs)


def encode(
    batch: GraphBatch,
    params: ModelParams | ParamTensors,
    delta: Tensor | None = None,
) -> EncoderOutput:
    """GIN forward pass with sum readout of the final layer."""
    tensors = as_tensors(params)
    hidden1 = encode_first_layer(batch, tensors)
    return EncoderOutput(hidden1=hidden1, z=encode_from_hidden(batch, hidden1, tensors, delta))


def extract(z: Tensor, params: ModelParams | ParamTensors) -> DisentangledPair:
    tensors = as_tensors(params)
    width = tensors["aug.w1"].shape[0]
    if z.ndim != 2 or z.shape[1] != width:
        raise ModelError(f"extractor expects width {width}, got shape {z.shape}")
    return DisentangledPair(z_aug=mlp(z, tensors, "aug"), z_inv=mlp(z, tensors, "inv"))


def reconstruct(z_aug: Tensor, z_inv: Tensor, params: ModelParams | ParamTensors) -> Tensor:
    """``g_r(z_aug * z_inv)`` with elementwise-product fusion."""
    if z_aug.shape != z_inv.shape:
        raise ModelError(f"cannot fuse shapes {z_aug.shape} and {z_inv.shape}")
    return mlp(ops.mul(z_aug, z_inv), as_tensors(params), "recon")
