"""Bias-corrected Adam over named parameters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from acdgcl.advtrain.errors import TrainingError
from acdgcl.diffcore import GradientMap
from acdgcl.diffcore.tensor import Array
from acdgcl.model import ModelError, ModelParams


@dataclass(frozen=True)
class AdamState:
    """First and second moment estimates plus the step counter."""

    m: dict[str, Array] = field(default_factory=dict)
    v: dict[str, Array] = field(default_factory=dict)
    t: int = 0

    @classmethod
    def zeros(cls, params: ModelParams) -> AdamState:
        return cls(
            m={n: np.zeros_like(params[n]) for n in params},
            v={n: np.zeros_like(params[n]) for n in params},
            t=0,
        )


def adam_step(
    params: ModelParams,
    grads: GradientMap,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[ModelParams, AdamState]:
    """Apply one Adam update and return the new parameters and state.

    Raises:
        TrainingError: If a gradient or moment is missing or mis-shaped.
    """
    try:
        params.check_gradients(grads)
    except ModelError as e:
        raise TrainingError(str(e)) from None

    t = state.t + 1
    correction1 = 1.0 - beta1**t
    correction2 = 1.0 - beta2**t
    updated: dict[str, Array] = {}
    m: dict[str, Array] = {}
    v: dict[str, Array] = {}
    for name in params:
        value = params[name]
        m_prev = state.m.get(name)
        v_prev = state.v.get(name)
        if m_prev is None or v_prev is None:
            raise TrainingError(f"optimizer state has no moments for {name}")
        if m_prev.shape != value.shape or v_prev.shape != value.shape:
            raise TrainingError(f"optimizer moments for {name} do not match shape {value.shape}")
        g = grads[name]
        m[name] = beta1 * m_prev + (1.0 - beta1) * g
        v[name] = beta2 * v_prev + (1.0 - beta2) * g * g
        m_hat = m[name] / correction1
        v_hat = v[name] / correction2
        updated[name] = value - lr * m_hat / (np.sqrt(v_hat) + eps)

    return params.replace(updated), AdamState(m=m, v=v, t=t)
