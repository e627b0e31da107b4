"""
Versioned .npz checkpoints for MLP stacks, SSL models and task models.

Arrays are stored verbatim, so save -> load is bit-exact. Layout metadata
(kind, stack names, activation tags, version) travels as a JSON string entry.
"""

import hashlib
import json
import logging
from pathlib import Path

import numpy as np

from relkd.exceptions import RelkdError
from relkd.models import SslModel, TaskModel
from relkd.numerics.mlp import Layer, MlpParams

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

Checkpointable = MlpParams | SslModel | TaskModel


def _stacks(model: Checkpointable) -> tuple[str, dict[str, MlpParams], dict[str, np.ndarray]]:
    if isinstance(model, MlpParams):
        return "mlp", {"mlp": model}, {}
    if isinstance(model, SslModel):
        return "ssl", {"encoder_f": model.encoder_f, "predictor_m": model.predictor_m}, {}
    if isinstance(model, TaskModel):
        return "task", {"encoder": model.encoder}, {"head/weight": model.head_weight, "head/bias": model.head_bias}
    raise TypeError(f"Cannot checkpoint object of type {type(model).__name__}")


def save_checkpoint(path: str | Path, model: Checkpointable) -> Path:
    """
    Write a model to `path` (.npz).

    Returns:
        The written path
    """
    path = Path(path)
    kind, stacks, extras = _stacks(model)
    arrays: dict[str, np.ndarray] = dict(extras)
    layout = {"format_version": FORMAT_VERSION, "kind": kind, "stacks": {}}
    for name, stack in stacks.items():
        layout["stacks"][name] = {
            "activations": stack.activations,
            "shapes": [list(layer.weight.shape) for layer in stack.layers],
        }
        for i, layer in enumerate(stack.layers):
            arrays[f"{name}/{i}/weight"] = layer.weight
            arrays[f"{name}/{i}/bias"] = layer.bias
    arrays["__layout__"] = np.array(json.dumps(layout, sort_keys=True))
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        np.savez(f, **arrays)
    logger.debug(f"Saved {kind} checkpoint to {path}")
    return path


def load_checkpoint(path: str | Path) -> Checkpointable:
    """
    Read a model written by save_checkpoint.

    Raises:
        RelkdError: Missing file, unknown version or inconsistent layout
    """
    path = Path(path)
    if not path.exists():
        raise RelkdError(f"Checkpoint not found: {path}")
    with np.load(path, allow_pickle=False) as data:
        layout = json.loads(str(data["__layout__"]))
        if layout.get("format_version") != FORMAT_VERSION:
            raise RelkdError(f"Unsupported checkpoint version {layout.get('format_version')} in {path}")
        stacks = {}
        for name, info in layout["stacks"].items():
            layers = [
                Layer(weight=data[f"{name}/{i}/weight"].copy(), bias=data[f"{name}/{i}/bias"].copy())
                for i in range(len(info["shapes"]))
            ]
            stacks[name] = MlpParams(layers=layers, activations=list(info["activations"]))
        kind = layout["kind"]
        if kind == "mlp":
            return stacks["mlp"]
        if kind == "ssl":
            return SslModel(encoder_f=stacks["encoder_f"], predictor_m=stacks["predictor_m"])
        if kind == "task":
            return TaskModel(
                encoder=stacks["encoder"],
                head_weight=data["head/weight"].copy(),
                head_bias=data["head/bias"].copy(),
            )
    raise RelkdError(f"Unknown checkpoint kind '{kind}' in {path}")


def params_digest(model: Checkpointable) -> str:
    """SHA-256 over every parameter array's shape and bytes."""
    h = hashlib.sha256()
    for array in model.parameters():
        h.update(str(array.shape).encode())
        h.update(np.ascontiguousarray(array).tobytes())
    return h.hexdigest()
