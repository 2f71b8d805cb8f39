"""Central finite-difference verification of tape gradients."""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from acdgcl.diffcore.tensor import Array, DiffError, Tape, Tensor, backward

logger = logging.getLogger(__name__)

Objective = Callable[[Mapping[str, Tensor]], Tensor]

# Primitives whose derivative jumps where the input crosses zero.
KINKED_OPS = frozenset({"relu"})


class GradCheckError(DiffError):
    """The objective cannot be checked (bad step, non-deterministic output)."""


@dataclass
class GradCheckReport:
    """Outcome of a finite-difference check.

    Attributes:
        max_rel_error: Worst relative error over the sampled coordinates.
        passed: True iff ``max_rel_error < tol``.
        coordinates: Number of coordinates compared.
        per_parameter: Worst relative error per parameter name.
        worst: ``(name, flat_index)`` of the worst coordinate, if any.
        skipped: Coordinates passed over because the two shifted points lie
            on different sides of a relu kink.
    """

    max_rel_error: float
    passed: bool
    coordinates: int
    tol: float
    h: float
    per_parameter: dict[str, float] = field(default_factory=dict)
    worst: tuple[str, int] | None = None
    skipped: int = 0


def _evaluate(objective: Objective, values: Mapping[str, Array]) -> float:
    return objective({name: Tensor(v, name=name) for name, v in values.items()}).item()


def _straddles_kink(tape: Tape, name: str, plus: Array, minus: Array) -> bool:
    """True if some recorded relu input changes sign between the two shifted points."""
    upper = tape.replay({name: plus})
    lower = tape.replay({name: minus})
    for entry in tape.entries:
        if entry.op not in KINKED_OPS:
            continue
        x = entry.inputs[0]
        above = upper.get(x.id, x.data) > 0.0
        below = lower.get(x.id, x.data) > 0.0
        if not np.array_equal(above, below):
            return True
    return False


def finite_diff_check(
    objective: Objective,
    params: Mapping[str, ArrayLike],
    h: float = 1e-6,
    tol: float = 1e-5,
    samples: int = 100,
    seed: int = 0,
    abs_floor: float = 1e-3,
) -> GradCheckReport:
    """Compare reverse-mode gradients with central differences.

    Args:
        objective: Maps named parameter tensors to a scalar tensor.
        params: Base point, by parameter name.
        h: Finite-difference step.
        tol: Pass threshold on the relative error.
        samples: Coordinates to sample (all coordinates if fewer exist).
        seed: Seed for coordinate sampling.
        abs_floor: Lower bound of the relative-error denominator, so tiny
            gradients are compared absolutely.

    Raises:
        GradCheckError: If ``h <= 0`` or the objective is not deterministic.
    """
    if h <= 0:
        raise GradCheckError(f"finite-difference step must be positive, got {h}")

    base = {name: np.array(v, dtype=np.float64) for name, v in params.items()}

    with Tape() as tape:
        leaves = {name: tape.leaf(name, value) for name, value in base.items()}
        loss = objective(leaves)
    if tape.contains(loss):
        analytic = backward(tape, loss)
    else:
        analytic = {name: np.zeros_like(value) for name, value in base.items()}

    first = _evaluate(objective, base)
    second = _evaluate(objective, base)
    if first != second or first != loss.item():
        raise GradCheckError(
            f"objective is not deterministic: {loss.item()!r}, {first!r}, {second!r}"
        )

    coords = [(name, i) for name, value in base.items() for i in range(value.size)]
    order = np.random.default_rng(seed).permutation(len(coords))

    per_parameter: dict[str, float] = {}
    worst: tuple[str, int] | None = None
    max_err = 0.0
    compared = 0
    skipped = 0
    for position in order:
        if compared >= samples:
            break
        name, index = coords[int(position)]
        plus = base[name].copy()
        plus.flat[index] += h
        minus = base[name].copy()
        minus.flat[index] -= h
        if tape.contains(loss) and _straddles_kink(tape, name, plus, minus):
            skipped += 1
            continue

        f_plus = _evaluate(objective, {**base, name: plus})
        f_minus = _evaluate(objective, {**base, name: minus})
        numeric = (f_plus - f_minus) / (2.0 * h)
        compared += 1
        exact = float(analytic[name].flat[index])
        err = abs(exact - numeric) / max(abs(exact), abs(numeric), abs_floor)
        per_parameter[name] = max(per_parameter.get(name, 0.0), err)
        if worst is None or err > max_err:
            max_err, worst = err, (name, index)

    report = GradCheckReport(
        max_rel_error=max_err,
        passed=max_err < tol,
        coordinates=compared,
        tol=tol,
        h=h,
        per_parameter=per_parameter,
        worst=worst,
        skipped=skipped,
    )
    logger.debug(
        "gradcheck: %d coordinates (%d skipped at kinks), max rel err %.3e (worst %s)",
        compared,
        skipped,
        max_err,
        worst,
    )
    return report
