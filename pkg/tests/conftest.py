"""
Shared fixtures: a desk-sized experiment config written to a temp directory.
"""

import pytest
import yaml


def tiny_config_dict(out_dir, **sections) -> dict:
    config = {
        "experiment": {"id": "tiny", "seeds": [0, 1], "output_dir": str(out_dir), "log_every": 0},
        "dataset": {"source": "blobs", "n_train": 96, "n_test": 48, "num_classes": 3, "dim": 2, "spread": 0.5},
        "noise": {"kind": "symmetric", "rate": 0.2},
        "loss": {"name": "ce"},
        "rmd": {"K": 0.5},
        "model": {"encoder_hidden": [8], "rep_dim": 4, "predictor_hidden": 4, "activation": "tanh"},
        "optim": {"lr0": 0.05, "epochs": 2, "decay_start_epoch": 1, "decay_every": 1, "batch_size": 32},
        "ssl": {"epochs": 1, "batch_size": 32},
    }
    for name, values in sections.items():
        config[name] = {**config.get(name, {}), **values}
    return config


@pytest.fixture
def make_config():
    """Factory for tiny config dicts; keyword sections are merged over the defaults."""
    return tiny_config_dict


@pytest.fixture
def tiny_config(tmp_path):
    """Path to a YAML config that trains in well under a second per seed."""
    path = tmp_path / "tiny.yaml"
    path.write_text(yaml.safe_dump(tiny_config_dict(tmp_path / "runs")))
    return path
