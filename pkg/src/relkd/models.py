"""
Core data models shared across the toolkit.
"""

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from relkd.numerics.mlp import MlpParams

# Representation batches and relation matrices are plain float64 arrays.
RepBatch = np.ndarray  # (B, D), one representation row per sample
EdgeMatrix = np.ndarray  # (B, B) within-network Pearson correlations
NodeMatrix = np.ndarray  # (B, B) teacher rows x student columns


@dataclass
class Dataset:
    """Feature matrix with clean and (possibly) corrupted labels."""

    features: np.ndarray
    clean_labels: np.ndarray
    noisy_labels: np.ndarray
    num_classes: int
    corruption_mask: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        self.clean_labels = np.asarray(self.clean_labels, dtype=np.int64)
        self.noisy_labels = np.asarray(self.noisy_labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {self.features.shape}")
        n = self.features.shape[0]
        if self.clean_labels.shape != (n,) or self.noisy_labels.shape != (n,):
            raise ValueError("label vectors must have one entry per feature row")
        for name, labels in (("clean_labels", self.clean_labels), ("noisy_labels", self.noisy_labels)):
            if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
                raise ValueError(f"{name} outside [0, {self.num_classes})")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features contain non-finite entries")
        self.corruption_mask = self.noisy_labels != self.clean_labels

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def noise_fraction(self) -> float:
        return float(self.corruption_mask.mean()) if self.n else 0.0

    def with_noisy_labels(self, noisy_labels: np.ndarray) -> "Dataset":
        return Dataset(
            features=self.features,
            clean_labels=self.clean_labels,
            noisy_labels=noisy_labels,
            num_classes=self.num_classes,
        )

    def subset(self, indices: np.ndarray) -> "Dataset":
        return Dataset(
            features=self.features[indices],
            clean_labels=self.clean_labels[indices],
            noisy_labels=self.noisy_labels[indices],
            num_classes=self.num_classes,
        )


@dataclass(frozen=True)
class NoiseSpec:
    """Label corruption protocol."""

    kind: str  # symmetric, asymmetric, pairflip
    rate: float
    class_map: dict[int, int] | None = None
    preset: str | None = None  # cifar10, cifar100 (asymmetric only)


@dataclass
class TransitionMatrix:
    """Row-stochastic C x C corruption kernel; row = clean class."""

    probs: np.ndarray

    @property
    def C(self) -> int:
        return self.probs.shape[0]


@dataclass
class AugSpec:
    """Augmentation settings for the two SSL views."""

    kind: str = "jitter"  # jitter (vector data) or image (flattened H x W x C)
    sigma: float = 0.1
    mask_frac: float = 0.1
    image_shape: tuple[int, int, int] | None = None
    pad: int = 4
    flip: bool = True


@dataclass
class ViewPair:
    """Two stochastic augmentations of the same rows."""

    v: np.ndarray
    v_prime: np.ndarray


@dataclass
class LossOut:
    """Batch-mean loss value and its gradient w.r.t. logits."""

    value: float
    grad_logits: np.ndarray


class LossFn(Protocol):
    """Anything mapping (logits, labels) to a LossOut."""

    def __call__(self, logits: np.ndarray, labels: np.ndarray) -> LossOut: ...


@dataclass
class RobustParams:
    """Hyperparameters for the robust baselines (conventions, not ground truth)."""

    gce_q: float = 0.7
    sce_a: float = 0.1
    sce_b: float = 1.0
    sce_A: float = -4.0
    agce_a: float = 0.6
    agce_q: float = 0.6
    aul_a: float = 3.0
    aul_q: float = 0.1
    ael_a: float = 2.5
    active_weight: float = 1.0
    passive_weight: float = 1.0


@dataclass
class RmdWeights:
    """Node (alpha) and edge (beta) weights of the distillation loss."""

    alpha: float = 0.8
    beta: float = 0.35

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0:
            raise ValueError(f"RMD weights must be non-negative, got alpha={self.alpha}, beta={self.beta}")


@dataclass
class ModelSpec:
    """Widths shared by the teacher (f, m) and the student encoder."""

    encoder_hidden: list[int] = field(default_factory=lambda: [128])
    rep_dim: int = 64
    predictor_hidden: int = 32
    activation: str = "relu"


@dataclass
class SslModel:
    """Encoder f and predictor m of the relation-modeling channel."""

    encoder_f: MlpParams
    predictor_m: MlpParams

    def __post_init__(self) -> None:
        width = self.encoder_f.out_width
        if self.predictor_m.in_width != width or self.predictor_m.out_width != width:
            raise ValueError(
                f"predictor must map {width} -> {width}, got "
                f"{self.predictor_m.in_width} -> {self.predictor_m.out_width}"
            )

    def parameters(self) -> list[np.ndarray]:
        return self.encoder_f.parameters() + self.predictor_m.parameters()

    def with_parameters(self, arrays: list[np.ndarray]) -> "SslModel":
        split = len(self.encoder_f.parameters())
        return SslModel(
            encoder_f=self.encoder_f.with_parameters(arrays[:split]),
            predictor_m=self.predictor_m.with_parameters(arrays[split:]),
        )


@dataclass
class SslConfig:
    """Self-supervised pretraining schedule."""

    lr: float = 0.03
    momentum: float = 0.9
    weight_decay: float = 5e-4
    batch_size: int = 64
    epochs: int = 50
    schedule: str = "cosine"
    aug: AugSpec = field(default_factory=AugSpec)
    seed: int = 0
    stop_gradient: bool = True

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise ValueError(f"ssl lr must be positive, got {self.lr}")
        if self.epochs < 0:
            raise ValueError(f"ssl epochs must be non-negative, got {self.epochs}")


@dataclass
class TaskModel:
    """Student encoder plus linear classification head."""

    encoder: MlpParams
    head_weight: np.ndarray
    head_bias: np.ndarray

    def __post_init__(self) -> None:
        if self.head_weight.shape[0] != self.encoder.out_width:
            raise ValueError(
                f"head expects width {self.head_weight.shape[0]}, encoder outputs {self.encoder.out_width}"
            )

    @property
    def num_classes(self) -> int:
        return self.head_weight.shape[1]

    def parameters(self) -> list[np.ndarray]:
        return self.encoder.parameters() + [self.head_weight, self.head_bias]

    def with_parameters(self, arrays: list[np.ndarray]) -> "TaskModel":
        return TaskModel(
            encoder=self.encoder.with_parameters(arrays[:-2]),
            head_weight=arrays[-2],
            head_bias=arrays[-1],
        )


@dataclass
class OptimConfig:
    """Task-channel SGD with step decay."""

    lr0: float = 0.05
    momentum: float = 0.9
    weight_decay: float = 5e-4
    decay_factor: float = 0.1
    decay_start_epoch: int = 150
    decay_every: int = 30
    epochs: int = 240
    batch_size: int = 64

    def __post_init__(self) -> None:
        if self.lr0 <= 0:
            raise ValueError(f"lr0 must be positive, got {self.lr0}")
        if not 0 <= self.momentum < 1:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if not 0 < self.decay_factor <= 1:
            raise ValueError(f"decay_factor must be in (0, 1], got {self.decay_factor}")


@dataclass
class LossSpec:
    """Base loss selection."""

    name: str = "ce"
    params: RobustParams = field(default_factory=RobustParams)


@dataclass
class TrainSpec:
    """What the task channel optimizes."""

    base_loss: LossSpec = field(default_factory=LossSpec)
    K: float = 1.0
    weights: RmdWeights = field(default_factory=RmdWeights)
    teacher: str = "pretrained"  # pretrained, random, none
    seed: int = 0
    norm: str = "frobenius"  # frobenius, mse

    @property
    def effective_K(self) -> float:
        return 0.0 if self.teacher == "none" else self.K


@dataclass
class EpochRecord:
    """One completed training epoch."""

    epoch: int
    base_loss: float
    rmd_loss: float
    total_loss: float
    train_acc: float
    test_acc: float


@dataclass
class TrainHistory:
    """Per-epoch records of a training run."""

    records: list[EpochRecord] = field(default_factory=list)

    def append(self, record: EpochRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)


@dataclass
class ResultRow:
    """One (config, seed) outcome."""

    config_id: str
    seed: int
    noise_kind: str
    noise_rate: float
    loss_name: str
    K: float
    test_accuracy: float
    wall_time: float = field(default=0.0, compare=False)
    teacher: str = "pretrained"


@dataclass
class DatasetSpec:
    """Where train/test data come from."""

    source: str = "blobs"  # blobs, csv, idx
    n_train: int = 5000
    n_test: int = 1000
    num_classes: int = 4
    dim: int = 2
    spread: float = 1.0
    radius: float = 4.0
    train_path: str | None = None
    test_path: str | None = None
    train_labels_path: str | None = None  # idx only
    test_labels_path: str | None = None  # idx only
    test_fraction: float = 0.2  # csv without test_path


@dataclass
class ExperimentConfig:
    """One declarative run, expanded over its seeds."""

    config_id: str = "default"
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    noise: NoiseSpec = field(default_factory=lambda: NoiseSpec(kind="symmetric", rate=0.0))
    train: TrainSpec = field(default_factory=TrainSpec)
    optim: OptimConfig = field(default_factory=OptimConfig)
    ssl: SslConfig = field(default_factory=SslConfig)
    model: ModelSpec = field(default_factory=ModelSpec)
    teacher_checkpoint: str | None = None
    task_aug: AugSpec | None = None
    seeds: list[int] = field(default_factory=lambda: [0])
    output_dir: str = "runs"
    threads: int = 1
    log_every: int = 10
