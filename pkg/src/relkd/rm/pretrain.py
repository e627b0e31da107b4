"""
Relation-modeling pretraining: label-free SimSiam training of the teacher.
"""

import logging

import numpy as np

from relkd.data.augment import augment_views
from relkd.exceptions import TrainingAbortedError
from relkd.models import ModelSpec, SslConfig, SslModel
from relkd.numerics.rng import RngStream
from relkd.rm.simsiam import init_ssl_model, simsiam_loss
from relkd.training.optim import SgdState, cosine_lr, sgd_step

logger = logging.getLogger(__name__)


def pretrain_rm(
    features: np.ndarray,
    cfg: SslConfig,
    arch: ModelSpec | None = None,
    init: SslModel | None = None,
    log_every: int = 10,
) -> SslModel:
    """
    Train encoder f and predictor m with SimSiam on unlabelled features.

    Only the feature matrix is accepted, so labels cannot leak into the
    teacher. Minibatches are reshuffled every epoch and the trailing partial
    batch is kept; the learning rate follows a per-step cosine decay.

    Args:
        features: (n, D) training rows
        cfg: Optimizer, schedule, augmentation and seed
        arch: Widths used when `init` is not given
        init: Optional starting model (copied, never mutated)
        log_every: Epoch interval for INFO progress lines

    Returns:
        Trained SslModel (the initial model when cfg.epochs == 0)

    Raises:
        TrainingAbortedError: If the loss or parameters become non-finite
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError(f"pretrain_rm needs a non-empty (n, D) feature matrix, got shape {x.shape}")
    rng = RngStream(cfg.seed).child("rm")
    model = init if init is not None else init_ssl_model(x.shape[1], arch or ModelSpec(), rng.child("init"))
    params = [a.copy() for a in model.parameters()]

    n = x.shape[0]
    batches_per_epoch = -(-n // cfg.batch_size)
    total_steps = cfg.epochs * batches_per_epoch
    state: SgdState | None = None
    step = 0
    logger.info(
        f"RM pretraining: {n} rows, {cfg.epochs} epochs x {batches_per_epoch} batches, "
        f"lr={cfg.lr}, stop_gradient={cfg.stop_gradient}"
    )

    for epoch in range(cfg.epochs):
        order = rng.child(f"shuffle/{epoch}").permutation(n)
        epoch_loss = 0.0
        for b in range(batches_per_epoch):
            idx = order[b * cfg.batch_size:(b + 1) * cfg.batch_size]
            views = augment_views(x[idx], cfg.aug, rng.child(f"aug/{epoch}/{b}"))
            current = model.with_parameters(params)
            result = simsiam_loss(current, views, stop_gradient=cfg.stop_gradient)
            if not np.isfinite(result.value):
                raise TrainingAbortedError("non-finite SimSiam loss", epoch=epoch, batch=b)

            lr = cosine_lr(step, total_steps, cfg.lr) if cfg.schedule == "cosine" else cfg.lr
            params, state = sgd_step(params, result.grads.parameters(), state, lr, cfg.momentum, cfg.weight_decay)
            if not all(np.all(np.isfinite(p)) for p in params):
                raise TrainingAbortedError("non-finite parameters after SGD step", epoch=epoch, batch=b)
            epoch_loss += result.value * len(idx)
            step += 1

        if log_every and (epoch % log_every == 0 or epoch == cfg.epochs - 1):
            logger.info(f"RM epoch {epoch}: loss={epoch_loss / n:.4f}")

    return model.with_parameters(params)
