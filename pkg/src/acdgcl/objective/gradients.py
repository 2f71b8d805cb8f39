"""Finite-difference checks of every loss term on a small synthetic batch."""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass

import numpy as np

from acdgcl.augment import edge_perturb, node_drop
from acdgcl.config import ModelConfig
from acdgcl.diffcore import GradCheckReport, Tensor, finite_diff_check
from acdgcl.graphdata import Graph, GraphBatch, to_batch
from acdgcl.model import ModelParams, encode, extract, init_params
from acdgcl.objective.losses import (
    ObjectiveWeights,
    ReconInputs,
    compute_losses,
    l_adv,
    l_inv,
    l_recon,
)

logger = logging.getLogger(__name__)

LOSS_TERMS = ("l_inv", "l_recon", "l_adv", "joint")

GRADCHECK_MODEL = ModelConfig(num_layers=2, hidden_dim=6, embed_dim=4)
NODE_LABEL_CLASSES = 3


@dataclass(frozen=True)
class GradcheckFixture:
    """Two views, the original graphs and a fixed first-layer perturbation."""

    view1: GraphBatch
    view2: GraphBatch
    original: GraphBatch
    delta: np.ndarray
    params: ModelParams


def random_graph(rng: np.random.Generator, min_nodes: int = 4, max_nodes: int = 7) -> Graph:
    n = int(rng.integers(min_nodes, max_nodes + 1))
    # path backbone plus random chords
    edges = [(i, i + 1) for i in range(n - 1)]
    edges += [tuple(int(x) for x in rng.choice(n, size=2, replace=False)) for _ in range(n // 2)]
    labels = rng.integers(0, NODE_LABEL_CLASSES, size=n)
    return Graph.from_edges(n, edges, labels, label=int(rng.integers(2)))


def build_fixture(seed: int = 0, num_graphs: int = 4, epsilon: float = 0.05) -> GradcheckFixture:
    rng = np.random.default_rng(seed)
    graphs = [random_graph(rng) for _ in range(num_graphs)]
    view1 = to_batch([node_drop(g, 0.2, rng) for g in graphs], NODE_LABEL_CLASSES)
    view2 = to_batch([edge_perturb(g, 0.2, rng) for g in graphs], NODE_LABEL_CLASSES)
    original = to_batch(graphs, NODE_LABEL_CLASSES)
    params = init_params(GRADCHECK_MODEL, NODE_LABEL_CLASSES, rng)
    delta = rng.uniform(-epsilon, epsilon, size=(original.num_nodes, GRADCHECK_MODEL.hidden_dim))
    return GradcheckFixture(view1, view2, original, delta, params)


def loss_objectives(
    fixture: GradcheckFixture,
    weights: ObjectiveWeights | None = None,
) -> dict[str, Callable[[Mapping[str, Tensor]], Tensor]]:
    """One objective per loss term, each a function of the named parameters."""
    weights = weights or ObjectiveWeights()
    tau, floor = weights.temperature, weights.norm_floor

    def views(p: Mapping[str, Tensor]) -> ReconInputs:
        enc1, enc2 = encode(fixture.view1, p), encode(fixture.view2, p)
        pair1, pair2 = extract(enc1.z, p), extract(enc2.z, p)
        return ReconInputs(enc1.z, enc2.z, pair1.z_aug, pair1.z_inv, pair2.z_aug, pair2.z_inv)

    def adversarial(p: Mapping[str, Tensor]) -> Tensor:
        z = encode(fixture.original, p, delta=Tensor(fixture.delta)).z
        return extract(z, p).z_inv

    def inv_term(p: Mapping[str, Tensor]) -> Tensor:
        v = views(p)
        return l_inv(v.z1_inv, v.z2_inv, tau, norm_floor=floor)

    def recon_term(p: Mapping[str, Tensor]) -> Tensor:
        return l_recon(views(p), p)

    def adv_term(p: Mapping[str, Tensor]) -> Tensor:
        v = views(p)
        return l_adv(v.z1_inv, v.z2_inv, adversarial(p), tau, norm_floor=floor)

    def joint_term(p: Mapping[str, Tensor]) -> Tensor:
        breakdown = compute_losses(
            fixture.view1, fixture.view2, p, weights, lambda _a, _b: adversarial(p)
        )
        return breakdown.total

    return {"l_inv": inv_term, "l_recon": recon_term, "l_adv": adv_term, "joint": joint_term}


def check_loss_gradients(
    tol: float = 1e-5,
    samples: int = 100,
    seed: int = 0,
    h: float = 1e-6,
) -> dict[str, GradCheckReport]:
    """Run :func:`finite_diff_check` on every loss term."""
    fixture = build_fixture(seed)
    reports: dict[str, GradCheckReport] = {}
    for term, objective in loss_objectives(fixture).items():
        reports[term] = finite_diff_check(
            objective, dict(fixture.params), h=h, tol=tol, samples=samples, seed=seed
        )
        logger.info("gradcheck %s: max rel err %.3e", term, reports[term].max_rel_error)
    return reports
