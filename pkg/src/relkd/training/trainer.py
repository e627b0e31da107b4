"""
Task-channel training under noisy labels.

Objective per batch: L = L_base(logits, noisy labels) + K * L_rmd(teacher reps,
student reps), where the student representation is the encoder output feeding
the linear head and the teacher is a frozen encoder evaluated on the same batch.
"""

import logging
from dataclasses import dataclass

import numpy as np

from relkd.data.augment import augment_views
from relkd.exceptions import ConfigurationError, DimensionError, TrainingAbortedError
from relkd.harness.metrics import accuracy
from relkd.losses.factory import LossFactory
from relkd.models import (
    AugSpec,
    Dataset,
    EpochRecord,
    LossFn,
    LossOut,
    ModelSpec,
    OptimConfig,
    TaskModel,
    TrainHistory,
    TrainSpec,
)
from relkd.numerics.mlp import MlpParams, init_mlp, mlp_backward, mlp_forward
from relkd.numerics.rng import RngStream
from relkd.relation.distill import rmdnet_loss
from relkd.training.optim import SgdState, sgd_step, step_lr

logger = logging.getLogger(__name__)

TEACHER_MODES = ("pretrained", "random", "none")


@dataclass
class TotalOut:
    """Combined objective split by where its gradient enters the network."""

    value: float
    grad_logits: np.ndarray
    grad_reps: np.ndarray | None


@dataclass
class BatchResult:
    """Objective pieces and parameter gradients for one batch."""

    total: TotalOut
    base_value: float
    rmd_value: float
    grads: list[np.ndarray]


def total_loss(base: LossOut, rmd_value: float, rmd_grads: np.ndarray | None, K: float) -> TotalOut:
    """
    L_base + K * L_rmd.

    The base gradient is w.r.t. logits, the distillation gradient w.r.t. the
    student representations; both are carried and merged during backprop.
    """
    if K < 0:
        raise ConfigurationError(f"K must be non-negative, got {K}", key="rmd.K")
    if K == 0 or rmd_grads is None:
        return TotalOut(value=base.value, grad_logits=base.grad_logits, grad_reps=None)
    return TotalOut(value=base.value + K * rmd_value, grad_logits=base.grad_logits, grad_reps=K * rmd_grads)


def init_task_model(in_dim: int, arch: ModelSpec, num_classes: int, rng: RngStream) -> TaskModel:
    """Student encoder in_dim -> hidden... -> rep_dim plus a linear head."""
    encoder = init_mlp([in_dim, *arch.encoder_hidden, arch.rep_dim], rng.child("encoder"), arch.activation)
    head_weight = rng.child("head").normal(0.0, np.sqrt(1.0 / arch.rep_dim), (arch.rep_dim, num_classes))
    return TaskModel(encoder=encoder, head_weight=head_weight, head_bias=np.zeros(num_classes))


def forward_logits(model: TaskModel, x: np.ndarray) -> np.ndarray:
    reps, _ = mlp_forward(model.encoder, x)
    return reps @ model.head_weight + model.head_bias


def predict(model: TaskModel, x: np.ndarray) -> np.ndarray:
    """Argmax of the head logits; ties go to the smallest class id."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.encoder.in_width:
        raise DimensionError(f"input shape {x.shape} does not match encoder width {model.encoder.in_width}")
    return np.argmax(forward_logits(model, x), axis=1)


def batch_gradients(
    model: TaskModel,
    x: np.ndarray,
    labels: np.ndarray,
    loss_fn: LossFn,
    teacher: MlpParams | None,
    spec: TrainSpec,
) -> BatchResult:
    """Objective value and gradients for every TaskModel parameter array."""
    reps, enc_cache = mlp_forward(model.encoder, x)
    logits = reps @ model.head_weight + model.head_bias
    base = loss_fn(logits, labels)

    K = spec.effective_K
    rmd_value = 0.0
    rmd_grad = None
    # a single-row batch has no pairwise relations
    if K > 0 and teacher is not None and len(x) >= 2:
        teacher_reps, _ = mlp_forward(teacher, x)
        rmd = rmdnet_loss(teacher_reps, reps, spec.weights, spec.norm)
        rmd_value, rmd_grad = rmd.value, rmd.grad_student
    total = total_loss(base, rmd_value, rmd_grad, K)

    g_head_w = reps.T @ total.grad_logits
    g_head_b = total.grad_logits.sum(axis=0)
    g_reps = total.grad_logits @ model.head_weight.T
    if total.grad_reps is not None:
        g_reps = g_reps + total.grad_reps
    enc_grads, _ = mlp_backward(model.encoder, enc_cache, g_reps)
    return BatchResult(
        total=total,
        base_value=base.value,
        rmd_value=rmd_value,
        grads=enc_grads.parameters() + [g_head_w, g_head_b],
    )


def train_task(
    ds: Dataset,
    spec: TrainSpec,
    optim: OptimConfig,
    teacher: MlpParams | None = None,
    arch: ModelSpec | None = None,
    test_ds: Dataset | None = None,
    augment: AugSpec | None = None,
    log_every: int = 10,
) -> tuple[TaskModel, TrainHistory]:
    """
    Train the student on noisy labels, optionally distilling from a frozen teacher.

    Args:
        ds: Training data; noisy_labels are the supervision
        spec: Base loss, K, RMD weights, teacher mode and seed
        optim: SGD and step-decay schedule
        teacher: Frozen teacher encoder (required unless spec.teacher == 'none')
        arch: Student widths; rep_dim must equal the teacher output width
        test_ds: Evaluated on clean labels after every epoch when given
        augment: Optional augmentation applied to the batch seen by both channels
        log_every: Epoch interval for INFO progress lines

    Returns:
        Final (last-epoch) model and one history record per epoch

    Raises:
        ConfigurationError: Missing teacher or width mismatch
        TrainingAbortedError: Non-finite loss or parameters
    """
    arch = arch or ModelSpec()
    if spec.teacher not in TEACHER_MODES:
        raise ConfigurationError(f"Unknown teacher mode '{spec.teacher}', expected one of {TEACHER_MODES}", key="teacher.mode")
    if spec.teacher == "none":
        teacher = None
    elif teacher is None:
        raise ConfigurationError(f"teacher mode '{spec.teacher}' needs a teacher encoder", key="teacher.mode")
    elif teacher.out_width != arch.rep_dim:
        raise ConfigurationError(
            f"student rep_dim {arch.rep_dim} must equal teacher width {teacher.out_width}", key="model.rep_dim"
        )

    rng = RngStream(spec.seed).child("task")
    model = init_task_model(ds.dim, arch, ds.num_classes, rng.child("init"))
    loss_fn = LossFactory.create(spec.base_loss)
    params = [a.copy() for a in model.parameters()]
    state: SgdState | None = None
    history = TrainHistory()

    n = ds.n
    batches = -(-n // optim.batch_size)
    logger.info(
        f"Task training: loss={loss_fn.name}, K={spec.effective_K}, teacher={spec.teacher}, "
        f"{optim.epochs} epochs x {batches} batches"
    )

    for epoch in range(optim.epochs):
        lr = step_lr(epoch, optim)
        order = rng.child(f"shuffle/{epoch}").permutation(n)
        sums = np.zeros(3)
        for b in range(batches):
            idx = order[b * optim.batch_size:(b + 1) * optim.batch_size]
            x = ds.features[idx]
            if augment is not None:
                x = augment_views(x, augment, rng.child(f"aug/{epoch}/{b}")).v
            current = model.with_parameters(params)
            result = batch_gradients(current, x, ds.noisy_labels[idx], loss_fn, teacher, spec)
            if not np.isfinite(result.total.value):
                raise TrainingAbortedError("non-finite training loss", epoch=epoch, batch=b)
            params, state = sgd_step(params, result.grads, state, lr, optim.momentum, optim.weight_decay)
            if not all(np.all(np.isfinite(p)) for p in params):
                raise TrainingAbortedError("non-finite parameters after SGD step", epoch=epoch, batch=b)
            sums += len(idx) * np.array([result.base_value, result.rmd_value, result.total.value])

        model = model.with_parameters(params)
        train_acc = accuracy(predict(model, ds.features), ds.noisy_labels)
        test_acc = accuracy(predict(model, test_ds.features), test_ds.clean_labels) if test_ds is not None else float("nan")
        base_mean, rmd_mean, total_mean = sums / n
        history.append(EpochRecord(epoch, base_mean, rmd_mean, total_mean, train_acc, test_acc))
        if log_every and (epoch % log_every == 0 or epoch == optim.epochs - 1):
            logger.info(
                f"Epoch {epoch}: lr={lr:.2e} base={base_mean:.4f} rmd={rmd_mean:.4f} "
                f"train_acc={train_acc:.4f} test_acc={test_acc:.4f}"
            )

    return model.with_parameters(params), history
