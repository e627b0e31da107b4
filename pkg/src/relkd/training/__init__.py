"""
Task-channel training, optimizers and checkpoints.
"""

from relkd.training.checkpoint import load_checkpoint, params_digest, save_checkpoint
from relkd.training.optim import SgdState, cosine_lr, sgd_step, step_lr
from relkd.training.trainer import (
    TotalOut,
    batch_gradients,
    forward_logits,
    init_task_model,
    predict,
    total_loss,
    train_task,
)

__all__ = [
    "SgdState",
    "sgd_step",
    "step_lr",
    "cosine_lr",
    "TotalOut",
    "total_loss",
    "init_task_model",
    "forward_logits",
    "predict",
    "batch_gradients",
    "train_task",
    "save_checkpoint",
    "load_checkpoint",
    "params_digest",
]
