"""
RelkdRunner - Orchestrates noise injection, teacher pretraining, task training
and evaluation for one experiment configuration and its sweeps.
"""

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import pandas as pd

from relkd.data.csv_dataset import CsvSchema, load_csv
from relkd.data.idx_dataset import load_idx
from relkd.data.noise import build_transition, inject_noise
from relkd.data.synthetic import make_blobs
from relkd.exceptions import RelkdError
from relkd.harness.metrics import accuracy, representation_metrics
from relkd.harness.report import k_pivot
from relkd.harness.results import write_history, write_results
from relkd.models import Dataset, ExperimentConfig, ResultRow, SslModel
from relkd.numerics.mlp import MlpParams
from relkd.numerics.rng import RngStream
from relkd.rm.pretrain import pretrain_rm
from relkd.rm.simsiam import encode, init_ssl_model
from relkd.training.checkpoint import load_checkpoint, params_digest, save_checkpoint
from relkd.training.trainer import predict, train_task

logger = logging.getLogger(__name__)


@dataclass
class SweepResult:
    """Rows of a K sweep and their per-K pivot."""

    rows: list[ResultRow]
    table: pd.DataFrame


@dataclass
class SeedData:
    """Train/test split for one seed; test labels never pass through injection."""

    train: Dataset
    test: Dataset


class RelkdRunner:
    """
    Runs the full protocol for every seed of an ExperimentConfig.

    Usage:
        runner = RelkdRunner.from_config("relkd.yaml")
        rows = runner.run_experiment()
        sweep = runner.sweep_k([0, 0.001, 1])
    """

    def __init__(self, config: ExperimentConfig) -> None:
        """
        Initialize runner with a validated configuration.

        Args:
            config: Experiment configuration
        """
        self.config = config
        self._teachers: dict[tuple, SslModel] = {}
        self._teacher_locks: dict[tuple, threading.Lock] = {}
        self._lock = threading.Lock()
        logger.info(f"RelkdRunner initialized for '{config.config_id}' with seeds {config.seeds}")

    @classmethod
    def from_config(cls, config_file: str = "relkd.yaml", overrides: list[str] | None = None) -> "RelkdRunner":
        """
        Create a runner from a YAML configuration file.

        Args:
            config_file: Path to YAML config file
            overrides: Optional dotted key=value overrides

        Returns:
            Initialized RelkdRunner
        """
        from relkd.config import load_experiment

        return cls(load_experiment(Path(config_file), overrides))

    # ------------------------------------------------------------------
    # data
    # ------------------------------------------------------------------

    def load_data(self, cfg: ExperimentConfig, seed: int) -> SeedData:
        """Build the clean train/test split for a seed, then corrupt train labels only."""
        spec = cfg.dataset
        rng = RngStream(seed).child("data")
        if spec.source == "blobs":
            train = make_blobs(spec.n_train, spec.num_classes, spec.dim, spec.spread, rng.child("train"), spec.radius)
            test = make_blobs(spec.n_test, spec.num_classes, spec.dim, spec.spread, rng.child("test"), spec.radius)
        elif spec.source == "idx":
            train = load_idx(spec.train_path, spec.train_labels_path)
            test = load_idx(spec.test_path, spec.test_labels_path, num_classes=train.num_classes)
        else:
            full = load_csv(spec.train_path)
            if spec.test_path:
                train = full
                test = load_csv(spec.test_path, CsvSchema(num_classes=full.num_classes))
            else:
                order = rng.child("split").permutation(full.n)
                n_test = max(1, int(round(spec.test_fraction * full.n)))
                test, train = full.subset(order[:n_test]), full.subset(order[n_test:])

        T = build_transition(cfg.noise, train.num_classes)
        train = inject_noise(train, T, RngStream(seed).child("noise"))
        return SeedData(train=train, test=test)

    # ------------------------------------------------------------------
    # teacher
    # ------------------------------------------------------------------

    def _teacher_key(self, cfg: ExperimentConfig, seed: int) -> tuple:
        checkpoint = cfg.teacher_checkpoint if cfg.train.teacher == "pretrained" else None
        return (seed, cfg.train.teacher, checkpoint, repr(cfg.ssl), repr(cfg.model), repr(cfg.dataset))

    def get_teacher(self, cfg: ExperimentConfig, seed: int, data: SeedData, run_dir: Path) -> MlpParams | None:
        """Frozen teacher encoder for a seed (cached across K values)."""
        mode = cfg.train.teacher
        if mode == "none":
            return None
        key = self._teacher_key(cfg, seed)
        with self._lock:
            lock = self._teacher_locks.setdefault(key, threading.Lock())
        with lock:
            if key not in self._teachers:
                self._teachers[key] = self._build_teacher(cfg, seed, data)
            model = self._teachers[key]
        save_checkpoint(run_dir / "teacher.npz", model)
        return model.encoder_f

    def _build_teacher(self, cfg: ExperimentConfig, seed: int, data: SeedData) -> SslModel:
        if cfg.train.teacher == "pretrained" and cfg.teacher_checkpoint is not None:
            model = load_checkpoint(cfg.teacher_checkpoint)
            if not isinstance(model, SslModel):
                raise RelkdError(f"{cfg.teacher_checkpoint} is not an SSL checkpoint")
            return model
        if cfg.train.teacher == "random":
            return init_ssl_model(data.train.dim, cfg.model, RngStream(seed).child("random_teacher"))
        ssl_cfg = replace(cfg.ssl, seed=seed)
        model = pretrain_rm(data.train.features, ssl_cfg, cfg.model, log_every=cfg.log_every)
        metrics = representation_metrics(encode(model, data.train.features))
        logger.info(
            f"Teacher seed={seed}: std_mean={metrics['std_mean']:.4f} "
            f"effective_rank={metrics['effective_rank']:.2f}"
        )
        return model

    # ------------------------------------------------------------------
    # runs
    # ------------------------------------------------------------------

    def run_dir(self, cfg: ExperimentConfig, seed: int) -> Path:
        return Path(cfg.output_dir) / cfg.config_id / f"seed{seed}"

    def run_single(self, cfg: ExperimentConfig, seed: int) -> ResultRow:
        """Inject noise -> teacher -> task training -> clean-label evaluation."""
        start = time.perf_counter()
        run_dir = self.run_dir(cfg, seed)
        run_dir.mkdir(parents=True, exist_ok=True)
        data = self.load_data(cfg, seed)

        teacher = self.get_teacher(cfg, seed, data, run_dir)
        digest = params_digest(teacher) if teacher is not None else None

        spec = replace(cfg.train, seed=seed)
        model, history = train_task(
            data.train, spec, cfg.optim, teacher=teacher, arch=cfg.model,
            test_ds=data.test, augment=cfg.task_aug, log_every=cfg.log_every,
        )
        if teacher is not None and params_digest(teacher) != digest:
            raise RelkdError(f"teacher parameters changed during training (config={cfg.config_id}, seed={seed})")

        save_checkpoint(run_dir / "task.npz", model)
        write_history(history, run_dir / "history.csv")
        test_acc = accuracy(predict(model, data.test.features), data.test.clean_labels)

        row = ResultRow(
            config_id=cfg.config_id,
            seed=seed,
            noise_kind=cfg.noise.kind,
            noise_rate=cfg.noise.rate,
            loss_name=cfg.train.base_loss.name,
            K=spec.effective_K,
            test_accuracy=test_acc,
            wall_time=time.perf_counter() - start,
            teacher=cfg.train.teacher,
        )
        logger.info(f"[{cfg.config_id} seed={seed}] test_acc={test_acc:.4f} ({row.wall_time:.1f}s)")
        return row

    def run_cells(self, cells: list[tuple[ExperimentConfig, int]], threads: int | None = None) -> list[ResultRow]:
        """Run (config, seed) cells, in parallel when threads > 1; rows sorted by (config id, seed)."""
        threads = threads or self.config.threads

        def work(cell: tuple[ExperimentConfig, int]) -> ResultRow:
            cfg, seed = cell
            try:
                return self.run_single(cfg, seed)
            except RelkdError as e:
                logger.error(f"Run failed (config={cfg.config_id}, seed={seed}): {e}")
                raise

        if threads > 1 and len(cells) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                rows = list(pool.map(work, cells))
        else:
            rows = [work(c) for c in cells]
        return sorted(rows, key=lambda r: (r.config_id, r.seed))

    def run_experiment(self, cfg: ExperimentConfig | None = None) -> list[ResultRow]:
        """
        One row per seed; checkpoints and histories go under output_dir.

        Returns:
            ResultRows sorted by (config id, seed)
        """
        cfg = cfg or self.config
        rows = self.run_cells([(cfg, seed) for seed in cfg.seeds])
        write_results(rows, Path(cfg.output_dir) / cfg.config_id / "results.csv")
        return rows

    def sweep_k(self, k_values: list[float], cfg: ExperimentConfig | None = None) -> SweepResult:
        """
        Seeds x K grid with K overridden per cell.

        Duplicate K values are dropped with a warning. Writes results.csv and
        k_pivot.csv under <output_dir>/<config id>-sweep.
        """
        cfg = cfg or self.config
        if not k_values:
            raise RelkdError("sweep_k needs at least one K value")
        unique: list[float] = []
        for k in k_values:
            if float(k) in unique:
                logger.warning(f"Duplicate K value {k} ignored")
                continue
            unique.append(float(k))

        cells = []
        for k in unique:
            k_cfg = replace(cfg, config_id=f"{cfg.config_id}-K{k:g}", train=replace(cfg.train, K=k))
            cells.extend((k_cfg, seed) for seed in cfg.seeds)
        rows = self.run_cells(cells)

        out = Path(cfg.output_dir) / f"{cfg.config_id}-sweep"
        write_results(rows, out / "results.csv")
        table = k_pivot(rows)
        table.to_csv(out / "k_pivot.csv")
        return SweepResult(rows=rows, table=table)

    def ablation_configs(self, cfg: ExperimentConfig | None = None, degraded_k: float = 5.0) -> list[ExperimentConfig]:
        """Base loss / +RGRL random teacher / +RGRL+RM / +RGRL random teacher at K=degraded_k."""
        cfg = cfg or self.config
        name = cfg.train.base_loss.name
        return [
            replace(cfg, config_id=f"{name}", train=replace(cfg.train, teacher="none", K=0.0)),
            replace(cfg, config_id=f"{name}+rgrl", train=replace(cfg.train, teacher="random")),
            replace(cfg, config_id=f"{name}+rgrl+rm", train=replace(cfg.train, teacher="pretrained")),
            replace(cfg, config_id=f"{name}+rgrl-k{degraded_k:g}", train=replace(cfg.train, teacher="random", K=degraded_k)),
        ]

    def ablate(self, cfg: ExperimentConfig | None = None, degraded_k: float = 5.0) -> list[ResultRow]:
        """Run the ablation configs over all seeds; writes <output_dir>/<config id>-ablation/results.csv."""
        cfg = cfg or self.config
        cells = [(c, seed) for c in self.ablation_configs(cfg, degraded_k) for seed in c.seeds]
        rows = self.run_cells(cells)
        write_results(rows, Path(cfg.output_dir) / f"{cfg.config_id}-ablation" / "results.csv")
        return rows

    def pretrain(self, cfg: ExperimentConfig | None = None) -> list[Path]:
        """Pretrain and save one teacher per seed without task training."""
        cfg = cfg or self.config
        paths = []
        for seed in cfg.seeds:
            run_dir = self.run_dir(cfg, seed)
            run_dir.mkdir(parents=True, exist_ok=True)
            data = self.load_data(cfg, seed)
            self.get_teacher(replace(cfg, train=replace(cfg.train, teacher="pretrained")), seed, data, run_dir)
            paths.append(run_dir / "teacher.npz")
        return paths


def mean_accuracy(rows: list[ResultRow], config_id: str) -> float:
    """Mean test accuracy over the seeds of one config id."""
    values = [r.test_accuracy for r in rows if r.config_id == config_id]
    if not values:
        raise RelkdError(f"No rows for config '{config_id}'")
    return float(np.mean(values))
