"""
Configuration loader, dotted overrides and validation.
"""

import copy
import logging
import os
from pathlib import Path
from typing import Any

import yaml

from relkd.exceptions import ConfigurationError
from relkd.models import (
    AugSpec,
    DatasetSpec,
    ExperimentConfig,
    LossSpec,
    ModelSpec,
    NoiseSpec,
    OptimConfig,
    RmdWeights,
    RobustParams,
    SslConfig,
    TrainSpec,
)

logger = logging.getLogger(__name__)


# =============================================================================
# CENTRALIZED DEFAULTS
# =============================================================================
# All default values in one place. Desk-scale values; `optim.preset` and
# `ssl.preset` switch to the published CIFAR schedules.

DEFAULTS = {
    "experiment": {
        "id": "default",
        "seeds": [0],
        "output_dir": "runs",
        "threads": 1,
        "log_every": 10,
    },
    "dataset": {
        "source": "blobs",
        "n_train": 5000,
        "n_test": 1000,
        "num_classes": 4,
        "dim": 2,
        "spread": 1.0,
        "radius": 4.0,
        "train_path": None,
        "test_path": None,
        "train_labels_path": None,
        "test_labels_path": None,
        "test_fraction": 0.2,
    },
    "noise": {
        "kind": "symmetric",
        "rate": 0.0,
        "preset": None,
        "class_map": None,
    },
    # Robust-loss conventions; none of these are fixed by the method itself.
    "loss": {
        "name": "ce",
        "gce_q": 0.7,
        "sce_a": 0.1,
        "sce_b": 1.0,
        "sce_A": -4.0,
        "agce_a": 0.6,
        "agce_q": 0.6,
        "aul_a": 3.0,
        "aul_q": 0.1,
        "ael_a": 2.5,
        "active_weight": 1.0,
        "passive_weight": 1.0,
    },
    "rmd": {
        "K": 1.0,
        "alpha": 0.8,
        "beta": 0.35,
        "norm": "frobenius",
    },
    "teacher": {
        "mode": "pretrained",  # pretrained, random, none
        "checkpoint": None,
    },
    "model": {
        "encoder_hidden": [128],
        "rep_dim": 64,
        "predictor_hidden": 32,
        "activation": "relu",
    },
    "optim": {
        "preset": None,
        "lr0": 0.05,
        "momentum": 0.9,
        "weight_decay": 5e-4,
        "decay_factor": 0.1,
        "decay_start_epoch": 20,
        "decay_every": 5,
        "epochs": 30,
        "batch_size": 64,
    },
    "ssl": {
        "preset": None,
        "lr": 0.03,
        "momentum": 0.9,
        "weight_decay": 5e-4,
        "batch_size": 64,
        "epochs": 50,
        "schedule": "cosine",
        "stop_gradient": True,
        "aug": {
            "kind": "jitter",
            "sigma": 0.3,
            "mask_frac": 0.1,
            "image_shape": None,
            "pad": 4,
            "flip": True,
        },
    },
    "task_aug": None,
}

# Published schedules for the two image benchmarks.
OPTIM_PRESETS = {
    "cifar10": {"lr0": 0.001, "momentum": 0.9, "weight_decay": 5e-4, "decay_factor": 0.1,
                "decay_start_epoch": 150, "decay_every": 30, "epochs": 240, "batch_size": 64},
    "cifar100": {"lr0": 0.01, "momentum": 0.9, "weight_decay": 5e-4, "decay_factor": 0.1,
                 "decay_start_epoch": 150, "decay_every": 30, "epochs": 240, "batch_size": 64},
}
SSL_PRESETS = {
    "cifar": {"lr": 0.03, "momentum": 0.9, "weight_decay": 5e-4, "batch_size": 64,
              "epochs": 1000, "schedule": "cosine"},
}

REQUIRED_SECTIONS = ("dataset", "noise", "loss")


def load_config(config_path: Path) -> dict:
    """
    Load experiment configuration from a YAML file.

    Args:
        config_path: Path to YAML configuration file

    Returns:
        Parsed configuration dictionary

    Raises:
        ConfigurationError: If config file not found or invalid
    """
    config_path = Path(config_path)
    if not config_path.exists():
        raise ConfigurationError(f"Configuration file not found: {config_path}")

    with open(config_path) as f:
        try:
            config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Invalid YAML in {config_path}: {e}") from e

    if config is None:
        raise ConfigurationError(f"Empty configuration file: {config_path}")
    if not isinstance(config, dict):
        raise ConfigurationError(f"Top level of {config_path} must be a mapping")

    config = _expand_env_vars(config)
    _validate_sections(config)

    logger.info(f"Loaded configuration from {config_path}")
    return config


def _expand_env_vars(obj: Any) -> Any:
    """Recursively expand ${VAR} patterns in config values."""
    if isinstance(obj, dict):
        return {k: _expand_env_vars(v) for k, v in obj.items()}
    elif isinstance(obj, list):
        return [_expand_env_vars(item) for item in obj]
    elif isinstance(obj, str) and obj.startswith("${") and obj.endswith("}"):
        var_name = obj[2:-1]
        value = os.environ.get(var_name)
        if value is None:
            logger.warning(f"Environment variable not set: {var_name}")
            return obj
        return yaml.safe_load(value)
    return obj


def _validate_sections(config: dict) -> None:
    """Validate top-level structure."""
    for section in REQUIRED_SECTIONS:
        if section not in config:
            raise ConfigurationError(f"Missing required '{section}' section in config", key=section)
    for section in config:
        if section not in DEFAULTS:
            raise ConfigurationError(f"Unknown config section '{section}'", key=section)


def apply_overrides(config: dict, overrides: list[str]) -> dict:
    """
    Apply `dotted.key=value` overrides; values are parsed as YAML scalars.

    Returns:
        A new configuration dict
    """
    out = copy.deepcopy(config)
    for item in overrides:
        if "=" not in item:
            raise ConfigurationError(f"Override '{item}' is not of the form key=value")
        key, raw = item.split("=", 1)
        key = key.strip()
        parts = key.split(".")
        if parts[0] not in DEFAULTS:
            raise ConfigurationError(f"Unknown config section '{parts[0]}'", key=key)
        node = out
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigurationError("cannot descend into a scalar", key=key)
        node[parts[-1]] = yaml.safe_load(raw)
    return out


def _section(config: dict, name: str) -> dict:
    """Section merged over its defaults; unknown keys are rejected."""
    defaults = DEFAULTS[name] or {}
    given = config.get(name) or {}
    if not isinstance(given, dict):
        raise ConfigurationError("section must be a mapping", key=name)
    for key in given:
        if key not in defaults:
            raise ConfigurationError("unknown key", key=f"{name}.{key}")
    return {**defaults, **given}


def _aug(raw: dict | None, key: str) -> AugSpec | None:
    if raw is None:
        return None
    merged = {**DEFAULTS["ssl"]["aug"], **raw}
    for k in raw:
        if k not in DEFAULTS["ssl"]["aug"]:
            raise ConfigurationError("unknown key", key=f"{key}.{k}")
    shape = merged["image_shape"]
    return AugSpec(
        kind=merged["kind"],
        sigma=float(merged["sigma"]),
        mask_frac=float(merged["mask_frac"]),
        image_shape=tuple(shape) if shape is not None else None,
        pad=int(merged["pad"]),
        flip=bool(merged["flip"]),
    )


def _build(key: str, factory, **kwargs):
    """Construct a dataclass, re-raising value errors with the section key."""
    try:
        return factory(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(str(e), key=key) from e


def build_experiment_config(config: dict, check_paths: bool = True) -> ExperimentConfig:
    """
    Turn a raw configuration dict into a validated ExperimentConfig.

    Raises:
        ConfigurationError: Naming the offending dotted key
    """
    exp = _section(config, "experiment")
    ds = _section(config, "dataset")
    noise = _section(config, "noise")
    loss = _section(config, "loss")
    rmd = _section(config, "rmd")
    teacher = _section(config, "teacher")
    model = _section(config, "model")
    optim = _section(config, "optim")
    ssl = _section(config, "ssl")

    if optim["preset"] is not None:
        if optim["preset"] not in OPTIM_PRESETS:
            raise ConfigurationError(f"unknown preset '{optim['preset']}'", key="optim.preset")
        optim = {**optim, **OPTIM_PRESETS[optim["preset"]], **(config.get("optim") or {})}
    if ssl["preset"] is not None:
        if ssl["preset"] not in SSL_PRESETS:
            raise ConfigurationError(f"unknown preset '{ssl['preset']}'", key="ssl.preset")
        ssl = {**ssl, **SSL_PRESETS[ssl["preset"]], **(config.get("ssl") or {})}

    seeds = exp["seeds"]
    if isinstance(seeds, int):
        seeds = [seeds]
    if not seeds:
        raise ConfigurationError("at least one seed is required", key="experiment.seeds")

    dataset = _build("dataset", DatasetSpec, **ds)
    if dataset.source not in ("blobs", "csv", "idx"):
        raise ConfigurationError(f"unknown source '{dataset.source}'", key="dataset.source")
    if dataset.source in ("csv", "idx") and not dataset.train_path:
        raise ConfigurationError(f"{dataset.source} source needs train_path", key="dataset.train_path")

    class_map = noise["class_map"]
    if class_map is not None:
        class_map = {int(k): int(v) for k, v in class_map.items()}
    if not 0.0 <= float(noise["rate"]) <= 1.0:
        raise ConfigurationError(f"rate must be in [0, 1], got {noise['rate']}", key="noise.rate")
    if noise["kind"] not in ("symmetric", "asymmetric", "pairflip"):
        raise ConfigurationError(f"unknown noise kind '{noise['kind']}'", key="noise.kind")
    if noise["kind"] == "asymmetric" and class_map is None and noise["preset"] is None:
        raise ConfigurationError("asymmetric noise needs class_map or preset", key="noise.class_map")
    noise_spec = NoiseSpec(kind=noise["kind"], rate=float(noise["rate"]), class_map=class_map, preset=noise["preset"])

    loss_name = loss.pop("name")
    loss_spec = LossSpec(name=loss_name, params=_build("loss", RobustParams, **{k: float(v) for k, v in loss.items()}))
    if float(rmd["K"]) < 0:
        raise ConfigurationError(f"K must be non-negative, got {rmd['K']}", key="rmd.K")
    if rmd["norm"] not in ("frobenius", "mse"):
        raise ConfigurationError(f"unknown norm '{rmd['norm']}'", key="rmd.norm")
    if teacher["mode"] not in ("pretrained", "random", "none"):
        raise ConfigurationError(f"unknown teacher mode '{teacher['mode']}'", key="teacher.mode")
    train = TrainSpec(
        base_loss=loss_spec,
        K=float(rmd["K"]),
        weights=_build("rmd", RmdWeights, alpha=float(rmd["alpha"]), beta=float(rmd["beta"])),
        teacher=teacher["mode"],
        norm=rmd["norm"],
    )

    optim.pop("preset")
    optim_cfg = _build("optim", OptimConfig, **optim)
    ssl.pop("preset")
    aug = _aug(ssl.pop("aug"), "ssl.aug")
    ssl_cfg = _build("ssl", SslConfig, aug=aug, **ssl)
    if ssl_cfg.schedule not in ("cosine", "constant"):
        raise ConfigurationError(f"unknown schedule '{ssl_cfg.schedule}'", key="ssl.schedule")
    model_spec = _build("model", ModelSpec, **model)
    if model_spec.activation not in ("relu", "tanh"):
        raise ConfigurationError(f"unknown activation '{model_spec.activation}'", key="model.activation")

    cfg = ExperimentConfig(
        config_id=str(exp["id"]),
        dataset=dataset,
        noise=noise_spec,
        train=train,
        optim=optim_cfg,
        ssl=ssl_cfg,
        model=model_spec,
        teacher_checkpoint=teacher["checkpoint"],
        task_aug=_aug(config.get("task_aug"), "task_aug"),
        seeds=[int(s) for s in seeds],
        output_dir=str(exp["output_dir"]),
        threads=int(exp["threads"]),
        log_every=int(exp["log_every"]),
    )
    if check_paths:
        validate_paths(cfg)
    return cfg


def validate_paths(cfg: ExperimentConfig) -> None:
    """Every referenced input file must exist."""
    ds = cfg.dataset
    for key in ("train_path", "test_path", "train_labels_path", "test_labels_path"):
        value = getattr(ds, key)
        if value is not None and not Path(value).exists():
            raise ConfigurationError(f"file not found: {value}", key=f"dataset.{key}")
    if cfg.teacher_checkpoint is not None and not Path(cfg.teacher_checkpoint).exists():
        raise ConfigurationError(f"file not found: {cfg.teacher_checkpoint}", key="teacher.checkpoint")


def load_experiment(config_path: Path, overrides: list[str] | None = None) -> ExperimentConfig:
    """load_config + overrides + build_experiment_config."""
    raw = load_config(Path(config_path))
    if overrides:
        raw = apply_overrides(raw, overrides)
    return build_experiment_config(raw)
