"""GIN encoder, disentangling extractors, reconstructor and their parameters."""

from acdgcl.model.checkpoint import (
    CHECKPOINT_FORMAT_VERSION,
    Checkpoint,
    CheckpointError,
    load_checkpoint,
    save_checkpoint,
)
from acdgcl.model.networks import (
    DisentangledPair,
    EncoderOutput,
    encode,
    encode_first_layer,
    encode_from_hidden,
    extract,
    reconstruct,
)
from acdgcl.model.params import ModelError, ModelParams, init_params, param_count, parameter_shapes

__all__ = [
    "CHECKPOINT_FORMAT_VERSION",
    "Checkpoint",
    "CheckpointError",
    "DisentangledPair",
    "EncoderOutput",
    "ModelError",
    "ModelParams",
    "encode",
    "encode_first_layer",
    "encode_from_hidden",
    "extract",
    "init_params",
    "load_checkpoint",
    "param_count",
    "parameter_shapes",
    "reconstruct",
    "save_checkpoint",
]
