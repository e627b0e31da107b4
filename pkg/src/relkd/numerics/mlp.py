"""
Fully connected stacks with exact reverse-mode gradients.

Weights are stored (fan_in, fan_out) so a forward layer is `x @ W + b`.
Hidden layers apply their activation tag; the last layer is affine only.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from relkd.exceptions import DimensionError
from relkd.numerics.rng import RngStream

logger = logging.getLogger(__name__)

ACTIVATIONS = ("tanh", "relu")


@dataclass
class Layer:
    """One affine map."""

    weight: np.ndarray
    bias: np.ndarray

    @property
    def fan_in(self) -> int:
        return self.weight.shape[0]

    @property
    def fan_out(self) -> int:
        return self.weight.shape[1]


@dataclass
class MlpParams:
    """Layer stack plus one activation tag per hidden layer."""

    layers: list[Layer]
    activations: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.layers:
            raise DimensionError("MlpParams needs at least one layer")
        if len(self.activations) != len(self.layers) - 1:
            raise DimensionError(
                f"expected {len(self.layers) - 1} activation tags, got {len(self.activations)}"
            )
        for tag in self.activations:
            if tag not in ACTIVATIONS:
                raise ValueError(f"Unknown activation '{tag}', expected one of {ACTIVATIONS}")
        for i, (prev, nxt) in enumerate(zip(self.layers[:-1], self.layers[1:])):
            if prev.fan_out != nxt.fan_in:
                raise DimensionError(
                    f"layer {i} outputs {prev.fan_out} but layer {i + 1} expects {nxt.fan_in}"
                )
        for i, layer in enumerate(self.layers):
            if layer.bias.shape != (layer.fan_out,):
                raise DimensionError(f"layer {i} bias shape {layer.bias.shape} != ({layer.fan_out},)")

    @property
    def in_width(self) -> int:
        return self.layers[0].fan_in

    @property
    def out_width(self) -> int:
        return self.layers[-1].fan_out

    @property
    def widths(self) -> list[int]:
        return [self.in_width] + [layer.fan_out for layer in self.layers]

    def parameters(self) -> list[np.ndarray]:
        """Flat list [W0, b0, W1, b1, ...]."""
        arrays: list[np.ndarray] = []
        for layer in self.layers:
            arrays.extend((layer.weight, layer.bias))
        return arrays

    def with_parameters(self, arrays: list[np.ndarray]) -> "MlpParams":
        """New stack of the same structure holding `arrays`."""
        if len(arrays) != 2 * len(self.layers):
            raise DimensionError(f"expected {2 * len(self.layers)} arrays, got {len(arrays)}")
        layers = [
            Layer(weight=np.asarray(arrays[2 * i], dtype=np.float64),
                  bias=np.asarray(arrays[2 * i + 1], dtype=np.float64))
            for i in range(len(self.layers))
        ]
        return MlpParams(layers=layers, activations=list(self.activations))

    def copy(self) -> "MlpParams":
        return self.with_parameters([a.copy() for a in self.parameters()])

    def zeros_like(self) -> "MlpParams":
        return self.with_parameters([np.zeros_like(a) for a in self.parameters()])

    def flatten(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.parameters()])

    def unflatten(self, vector: np.ndarray) -> "MlpParams":
        arrays = []
        offset = 0
        for a in self.parameters():
            arrays.append(np.asarray(vector[offset:offset + a.size], dtype=np.float64).reshape(a.shape))
            offset += a.size
        if offset != len(vector):
            raise DimensionError(f"vector length {len(vector)} != parameter count {offset}")
        return self.with_parameters(arrays)

    @classmethod
    def identity(cls, width: int) -> "MlpParams":
        """Single linear layer computing x -> x."""
        return cls(layers=[Layer(np.eye(width), np.zeros(width))], activations=[])


@dataclass
class MlpCache:
    """Per-layer inputs and hidden pre-activations from a forward pass."""

    inputs: list[np.ndarray]
    pre_activations: list[np.ndarray]


def init_mlp(widths: list[int], rng: RngStream, activation: str = "relu") -> MlpParams:
    """He/Glorot-scaled normal init for a stack with the given widths."""
    if len(widths) < 2:
        raise DimensionError(f"need at least input and output width, got {widths}")
    layers = []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        gain = 2.0 if activation == "relu" else 1.0
        scale = np.sqrt(gain / fan_in)
        layers.append(Layer(weight=rng.normal(0.0, scale, (fan_in, fan_out)), bias=np.zeros(fan_out)))
    return MlpParams(layers=layers, activations=[activation] * (len(layers) - 1))


def _activate(tag: str, z: np.ndarray) -> np.ndarray:
    if tag == "tanh":
        return np.tanh(z)
    return np.maximum(z, 0.0)


def _activation_grad(tag: str, z: np.ndarray, upstream: np.ndarray) -> np.ndarray:
    if tag == "tanh":
        t = np.tanh(z)
        return upstream * (1.0 - t * t)
    return upstream * (z > 0.0)


def mlp_forward(params: MlpParams, x: np.ndarray) -> tuple[np.ndarray, MlpCache]:
    """
    Run the stack on a batch.

    Args:
        params: Layer stack
        x: Batch of shape (B, in_width)

    Returns:
        Output of shape (B, out_width) and the cache needed by mlp_backward

    Raises:
        DimensionError: If x does not match the first layer
    """
    h = np.asarray(x, dtype=np.float64)
    if h.ndim != 2 or h.shape[1] != params.in_width:
        raise DimensionError(f"input shape {h.shape} does not match in_width {params.in_width}")
    inputs: list[np.ndarray] = []
    pre: list[np.ndarray] = []
    last = len(params.layers) - 1
    for i, layer in enumerate(params.layers):
        inputs.append(h)
        z = h @ layer.weight + layer.bias
        if i < last:
            pre.append(z)
            h = _activate(params.activations[i], z)
        else:
            h = z
    return h, MlpCache(inputs=inputs, pre_activations=pre)


def mlp_backward(
    params: MlpParams, cache: MlpCache, grad_out: np.ndarray
) -> tuple[MlpParams, np.ndarray]:
    """
    Back-propagate `grad_out` through the cached forward pass.

    Returns:
        Gradients (same structure as params) and gradient w.r.t. the input
    """
    g = np.asarray(grad_out, dtype=np.float64)
    if g.shape != (cache.inputs[0].shape[0], params.out_width):
        raise DimensionError(
            f"grad_out shape {g.shape} does not match output ({cache.inputs[0].shape[0]}, {params.out_width})"
        )
    grads: list[Layer] = [None] * len(params.layers)  # type: ignore[list-item]
    for i in range(len(params.layers) - 1, -1, -1):
        layer = params.layers[i]
        if i < len(params.layers) - 1:
            g = _activation_grad(params.activations[i], cache.pre_activations[i], g)
        grads[i] = Layer(weight=cache.inputs[i].T @ g, bias=g.sum(axis=0))
        g = g @ layer.weight.T
    return MlpParams(layers=grads, activations=list(params.activations)), g
