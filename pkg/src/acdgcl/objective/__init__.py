"""Loss terms of the disentangled adversarial contrastive objective."""

from acdgcl.objective.gradients import LOSS_TERMS, build_fixture, check_loss_gradients
from acdgcl.objective.losses import (
    NORM_FLOOR,
    Adversary,
    LossBreakdown,
    ObjectiveError,
    ObjectiveWeights,
    ReconInputs,
    compute_losses,
    info_nce,
    joint,
    l_adv,
    l_inv,
    l_recon,
)

__all__ = [
    "LOSS_TERMS",
    "NORM_FLOOR",
    "Adversary",
    "LossBreakdown",
    "ObjectiveError",
    "ObjectiveWeights",
    "ReconInputs",
    "build_fixture",
    "check_loss_gradients",
    "compute_losses",
    "info_nce",
    "joint",
    "l_adv",
    "l_inv",
    "l_recon",
]
