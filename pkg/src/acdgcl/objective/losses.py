"""Contrastive, reconstruction and adversarial loss terms.

Every function here composes diffcore primitives, so a loss computed under an
active :class:`~acdgcl.diffcore.Tape` can be differentiated with respect to the
model parameters.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from acdgcl.config import TrainConfig
from acdgcl.diffcore import Tensor, ops
from acdgcl.errors import AcdgclError
from acdgcl.graphdata import GraphBatch
from acdgcl.model import encode, extract, reconstruct
from acdgcl.model.networks import ParamTensors

# Receives the clean invariant embeddings of both views and returns the
# invariant embedding of the adversarial view.
Adversary = Callable[[Tensor, Tensor], Tensor]

# Smallest row norm the training objective divides by.
NORM_FLOOR = 1e-12


class ObjectiveError(AcdgclError):
    """Loss inputs are malformed (too few graphs, zero rows, bad weights)."""


@dataclass(frozen=True)
class LossBreakdown:
    """The joint objective and its components for one batch."""

    l_inv: Tensor
    l_recon: Tensor
    l_adv: Tensor
    total: Tensor
    lambda_r: float
    lambda_a: float
    temperature: float

    def as_floats(self) -> dict[str, float]:
        return {
            "l_inv": self.l_inv.item(),
            "l_recon": self.l_recon.item(),
            "l_adv": self.l_adv.item(),
            "total": self.total.item(),
        }


@dataclass(frozen=True)
class ReconInputs:
    """Encoder outputs and disentangled parts of both views, rows aligned by graph."""

    z1: Tensor
    z2: Tensor
    z1_aug: Tensor
    z1_inv: Tensor
    z2_aug: Tensor
    z2_inv: Tensor

    def validate(self) -> int:
        """Return the batch size after checking the six shapes agree."""
        if self.z1.ndim != 2 or self.z1.shape != self.z2.shape:
            raise ObjectiveError(f"encoder outputs differ: {self.z1.shape} vs {self.z2.shape}")
        parts = (self.z1_aug, self.z1_inv, self.z2_aug, self.z2_inv)
        first = parts[0].shape
        if any(p.shape != first for p in parts) or len(first) != 2:
            shapes = ", ".join(str(p.shape) for p in parts)
            raise ObjectiveError(f"disentangled parts differ in shape: {shapes}")
        if first[0] != self.z1.shape[0]:
            raise ObjectiveError(
                f"{first[0]} disentangled rows for {self.z1.shape[0]} encoder rows"
            )
        return self.z1.shape[0]


@dataclass(frozen=True)
class ObjectiveWeights:
    """Temperature, loss coefficients and reconstruction term switches.

    ``norm_floor`` bounds the row norms the contrastive terms divide by, so a
    graph whose invariant embedding is exactly zero does not stop training.
    """

    temperature: float = 0.2
    lambda_r: float = 5.0
    lambda_a: float = 0.5
    recon_intra: bool = True
    recon_cross: bool = True
    norm_floor: float | None = NORM_FLOOR

    @classmethod
    def from_config(cls, config: TrainConfig) -> ObjectiveWeights:
        return cls(
            temperature=config.temperature,
            lambda_r=config.lambda_r,
            lambda_a=config.lambda_a,
            recon_intra=config.recon_intra,
            recon_cross=config.recon_cross,
        )


def _normalize_rows(z: Tensor, label: str, floor: float | None) -> Tensor:
    squared = ops.sum(ops.mul(z, z), axis=1, keepdims=True)
    if floor is None:
        zero = np.flatnonzero(squared.data[:, 0] == 0.0)
        if zero.size:
            raise ObjectiveError(f"{label} row {int(zero[0])} has zero norm")
        return ops.div(z, ops.sqrt(squared))
    # max(|z|^2, floor^2), written through relu so gradient checks see the kink.
    floor_sq = floor * floor
    squared = ops.add(ops.relu(ops.sub(squared, floor_sq)), floor_sq)
    return ops.div(z, ops.sqrt(squared))


def info_nce(
    za: Tensor,
    zb: Tensor,
    temperature: float,
    *,
    norm_floor: float | None = None,
) -> Tensor:
    """Symmetric cross-view InfoNCE.

    Row ``i`` of ``za`` is the positive for row ``i`` of ``zb``; the other
    rows of the opposite view are its negatives. Both directions are averaged.

    Rows are divided by their norm. With ``norm_floor`` set, the divisor is
    ``max(norm, norm_floor)``, so an all-zero row contributes a zero direction
    instead of an error.

    Raises:
        ObjectiveError: If shapes differ, fewer than two rows are given, a row
            has zero norm and no ``norm_floor`` is set, or the temperature is
            not positive.
    """
    if za.shape != zb.shape or za.ndim != 2:
        raise ObjectiveError(f"info_nce needs two equal (B, d) inputs, got {za.shape} and {zb.shape}")
    if za.shape[0] < 2:
        raise ObjectiveError(f"info_nce needs at least 2 graphs for negatives, got {za.shape[0]}")
    if temperature <= 0:
        raise ObjectiveError(f"temperature must be positive, got {temperature}")

    na = _normalize_rows(za, "first view", norm_floor)
    nb = _normalize_rows(zb, "second view", norm_floor)
    sim = ops.scale(ops.matmul(na, ops.transpose(nb)), 1.0 / temperature)
    # Positives read off the diagonal keep each positive inside its own log-sum-exp.
    positives = ops.sum(ops.mul(sim, np.eye(za.shape[0])), axis=1)
    a_to_b = ops.mean(ops.sub(ops.logsumexp(sim, axis=1), positives))
    b_to_a = ops.mean(ops.sub(ops.logsumexp(sim, axis=0), positives))
    return ops.scale(ops.add(a_to_b, b_to_a), 0.5)


def l_inv(
    z1_inv: Tensor,
    z2_inv: Tensor,
    temperature: float,
    *,
    norm_floor: float | None = None,
) -> Tensor:
    """Agreement between the invariant parts of the two views."""
    return info_nce(z1_inv, z2_inv, temperature, norm_floor=norm_floor)


def l_recon(
    inputs: ReconInputs,
    params: ParamTensors,
    intra: bool = True,
    cross: bool = True,
) -> Tensor:
    """Squared error of rebuilding each view's encoding from disentangled parts.

    For view ``w`` with other view ``w'``, the intra term reconstructs ``z_w``
    from ``(z_w_aug, z_w_inv)`` and the cross term from ``(z_w_aug, z_w'_inv)``.
    The sum over graphs, views and enabled terms is divided by ``2B``.

    Raises:
        ObjectiveError: On inconsistent shapes or when both term groups are off.
    """
    if not intra and not cross:
        raise ObjectiveError("at least one reconstruction term group must be enabled")
    batch_size = inputs.validate()
    views = (
        (inputs.z1, inputs.z1_aug, inputs.z1_inv, inputs.z2_inv),
        (inputs.z2, inputs.z2_aug, inputs.z2_inv, inputs.z1_inv),
    )
    residuals: list[Tensor] = []
    for z, z_aug, own_inv, other_inv in views:
        if intra:
            residuals.append(ops.l2_norm_sq(ops.sub(z, reconstruct(z_aug, own_inv, params))))
        if cross:
            residuals.append(ops.l2_norm_sq(ops.sub(z, reconstruct(z_aug, other_inv, params))))
    total = residuals[0]
    for term in residuals[1:]:
        total = ops.add(total, term)
    return ops.scale(total, 1.0 / (2 * batch_size))


def l_adv(
    z1_inv: Tensor,
    z2_inv: Tensor,
    z_adv_inv: Tensor,
    temperature: float,
    *,
    norm_floor: float | None = None,
) -> Tensor:
    """Contrast both clean views against the adversarial view."""
    if not (z1_inv.shape == z2_inv.shape == z_adv_inv.shape):
        raise ObjectiveError(
            f"l_adv shapes differ: {z1_inv.shape}, {z2_inv.shape}, {z_adv_inv.shape}"
        )
    return ops.add(
        info_nce(z1_inv, z_adv_inv, temperature, norm_floor=norm_floor),
        info_nce(z2_inv, z_adv_inv, temperature, norm_floor=norm_floor),
    )


def joint(
    l_inv: Tensor,
    l_recon: Tensor,
    l_adv: Tensor,
    lambda_r: float,
    lambda_a: float,
    temperature: float = 0.2,
) -> LossBreakdown:
    """``l_inv + lambda_r * l_recon + lambda_a * l_adv``.

    Raises:
        ObjectiveError: If a coefficient is negative.
    """
    if lambda_r < 0 or lambda_a < 0:
        raise ObjectiveError(f"loss coefficients must be non-negative (lambda_r={lambda_r}, lambda_a={lambda_a})")
    total = ops.add(ops.add(l_inv, ops.scale(l_recon, lambda_r)), ops.scale(l_adv, lambda_a))
    return LossBreakdown(
        l_inv=l_inv,
        l_recon=l_recon,
        l_adv=l_adv,
        total=total,
        lambda_r=lambda_r,
        lambda_a=lambda_a,
        temperature=temperature,
    )


def compute_losses(
    view1: GraphBatch,
    view2: GraphBatch,
    params: ParamTensors,
    weights: ObjectiveWeights,
    adversary: Adversary | None = None,
) -> LossBreakdown:
    """Forward both views and assemble the joint objective for one batch.

    ``adversary`` is consulted only when ``weights.lambda_a > 0``; otherwise
    the adversarial term is a constant zero.
    """
    enc1 = encode(view1, params)
    enc2 = encode(view2, params)
    pair1 = extract(enc1.z, params)
    pair2 = extract(enc2.z, params)

    floor = weights.norm_floor
    invariance = l_inv(pair1.z_inv, pair2.z_inv, weights.temperature, norm_floor=floor)
    inputs = ReconInputs(enc1.z, enc2.z, pair1.z_aug, pair1.z_inv, pair2.z_aug, pair2.z_inv)
    if weights.recon_intra or weights.recon_cross:
        recon = l_recon(inputs, params, intra=weights.recon_intra, cross=weights.recon_cross)
    else:
        recon = Tensor(0.0)

    if weights.lambda_a > 0:
        if adversary is None:
            raise ObjectiveError("lambda_a > 0 needs an adversary")
        z_adv_inv = adversary(pair1.z_inv, pair2.z_inv)
        adversarial = l_adv(
            pair1.z_inv, pair2.z_inv, z_adv_inv, weights.temperature, norm_floor=floor
        )
    else:
        adversarial = Tensor(0.0)

    return joint(invariance, recon, adversarial, weights.lambda_r, weights.lambda_a, weights.temperature)
