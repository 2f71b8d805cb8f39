"""Projected gradient ascent on a first-hidden-layer perturbation.

The attack holds the model parameters and both clean invariant embeddings
fixed, then searches the l-infinity ball of radius ``epsilon`` for the
perturbation of the original graphs' first-layer node embeddings that most
increases the adversarial contrastive loss.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from acdgcl.config import PgdConfig, PgdInit
from acdgcl.diffcore import Tape, Tensor, backward, no_tape
from acdgcl.diffcore.tensor import Array
from acdgcl.graphdata import GraphBatch
from acdgcl.model import ModelParams, encode_first_layer, encode_from_hidden, extract
from acdgcl.objective import NORM_FLOOR, l_adv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PgdResult:
    """Final perturbation and the loss it reached.

    Attributes:
        delta: Perturbation with the shape of the batch's first hidden layer.
        initial_loss: Adversarial loss at the starting point.
        final_loss: Adversarial loss at ``delta``.
        linf_history: ``max |delta|`` after every ascent step.
    """

    delta: Tensor
    initial_loss: float
    final_loss: float
    linf_history: list[float] = field(default_factory=list)

    @property
    def improved(self) -> bool:
        return self.final_loss >= self.initial_loss


def _frozen(params: ModelParams | Mapping[str, Tensor]) -> dict[str, Tensor]:
    if isinstance(params, ModelParams):
        return params.tensors()
    return {name: Tensor(t.data) for name, t in params.items()}


def _as_array(value: Tensor | Array) -> Array:
    return value.data if isinstance(value, Tensor) else np.asarray(value, dtype=np.float64)


def pgd_maximize(
    batch: GraphBatch,
    params: ModelParams | Mapping[str, Tensor],
    z1_inv: Tensor | Array,
    z2_inv: Tensor | Array,
    cfg: PgdConfig,
    rng: np.random.Generator,
    temperature: float = 0.2,
) -> PgdResult:
    """Signed-gradient ascent with projection onto ``[-epsilon, epsilon]``.

    Parameters and the two invariant embeddings enter as constants, so no
    gradient reaches them and the caller's tape (if any) records nothing.
    """
    tensors = _frozen(params)
    anchor1 = Tensor(_as_array(z1_inv))
    anchor2 = Tensor(_as_array(z2_inv))
    with no_tape():
        hidden1 = encode_first_layer(batch, tensors)

    def loss_and_grad(delta: Array) -> tuple[float, Array]:
        with Tape() as tape:
            leaf = tape.leaf("delta", delta)
            z = encode_from_hidden(batch, hidden1, tensors, leaf)
            z_adv = extract(z, tensors).z_inv
            loss = l_adv(anchor1, anchor2, z_adv, temperature, norm_floor=NORM_FLOOR)
        return loss.item(), backward(tape, loss, wrt=["delta"])["delta"]

    eps = cfg.epsilon
    if eps == 0.0 or cfg.init is PgdInit.ZERO:
        delta = np.zeros(hidden1.shape, dtype=np.float64)
    else:
        delta = rng.uniform(-eps, eps, size=hidden1.shape)

    initial_loss, grad = loss_and_grad(delta)
    if eps == 0.0:
        return PgdResult(Tensor(delta), initial_loss, initial_loss, [0.0] * cfg.steps)

    step_size = cfg.effective_step_size
    history: list[float] = []
    loss = initial_loss
    for step in range(cfg.steps):
        delta = np.clip(delta + step_size * np.sign(grad), -eps, eps)
        history.append(float(np.max(np.abs(delta))) if delta.size else 0.0)
        loss, grad = loss_and_grad(delta)
        logger.debug("pgd step %d: l_adv=%.6f |delta|_inf=%.3g", step + 1, loss, history[-1])

    return PgdResult(Tensor(delta), initial_loss, loss, history)
