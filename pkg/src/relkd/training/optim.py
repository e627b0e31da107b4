"""
SGD with momentum/weight decay and the two learning-rate schedules.
"""

import math
from dataclasses import dataclass

import numpy as np

from relkd.exceptions import DimensionError
from relkd.models import OptimConfig


@dataclass
class SgdState:
    """Per-array velocity buffers (None until the first step)."""

    velocity: list[np.ndarray] | None = None


def sgd_step(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    state: SgdState | None,
    lr: float,
    momentum: float = 0.9,
    weight_decay: float = 5e-4,
) -> tuple[list[np.ndarray], SgdState]:
    """
    One heavy-ball step: v = momentum * v + g + wd * w; w = w - lr * v.

    Inputs are not mutated; new arrays are returned.
    """
    if len(params) != len(grads):
        raise DimensionError(f"{len(params)} parameter arrays but {len(grads)} gradients")
    state = state or SgdState()
    velocity = state.velocity or [np.zeros_like(p) for p in params]
    new_params: list[np.ndarray] = []
    new_velocity: list[np.ndarray] = []
    for w, g, v in zip(params, grads, velocity):
        if w.shape != g.shape or w.shape != v.shape:
            raise DimensionError(f"shape mismatch in sgd_step: param {w.shape}, grad {g.shape}")
        v_next = momentum * v + g + weight_decay * w
        new_velocity.append(v_next)
        new_params.append(w - lr * v_next)
    return new_params, SgdState(velocity=new_velocity)


def step_lr(epoch: int, cfg: OptimConfig) -> float:
    """lr0, multiplied by decay_factor at decay_start_epoch and every decay_every epochs after."""
    if epoch < 0:
        raise ValueError(f"epoch must be non-negative, got {epoch}")
    if epoch < cfg.decay_start_epoch:
        return cfg.lr0
    decays = 1 + (epoch - cfg.decay_start_epoch) // max(cfg.decay_every, 1)
    return cfg.lr0 * cfg.decay_factor ** decays


def cosine_lr(step: int, total_steps: int, lr0: float) -> float:
    """lr0 * (1 + cos(pi * step / total)) / 2, evaluated per step."""
    if total_steps <= 0:
        return lr0
    return lr0 * 0.5 * (1.0 + math.cos(math.pi * step / total_steps))
