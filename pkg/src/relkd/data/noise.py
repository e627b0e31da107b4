"""
Label-noise protocols: symmetric, asymmetric (class-pair map) and pairflip.

Each protocol is expressed as a row-stochastic transition matrix; injection
samples every noisy label with one categorical draw from the row of its clean
class.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from relkd.exceptions import ConfigurationError
from relkd.models import Dataset, NoiseSpec, TransitionMatrix
from relkd.numerics.rng import RngStream

logger = logging.getLogger(__name__)

NOISE_KINDS = ("symmetric", "asymmetric", "pairflip")

# airplane=0 automobile=1 bird=2 cat=3 deer=4 dog=5 frog=6 horse=7 ship=8 truck=9
CIFAR10_ASYMMETRIC: dict[int, int] = {
    9: 1,  # truck -> automobile
    2: 0,  # bird -> airplane
    4: 7,  # deer -> horse
    3: 5,  # cat -> dog
    5: 3,  # dog -> cat
}

# Fixed-size blocks keep the draws independent of the worker count.
_BLOCK = 8192


def cifar100_asymmetric_map(num_classes: int = 100, group: int = 5) -> dict[int, int]:
    """Rotate each class to the next one inside consecutive blocks of `group`."""
    if num_classes % group:
        raise ConfigurationError(
            f"{num_classes} classes do not split into blocks of {group}", key="noise.preset"
        )
    return {c: (c // group) * group + (c % group + 1) % group for c in range(num_classes)}


def _resolve_class_map(spec: NoiseSpec, C: int) -> dict[int, int]:
    if spec.class_map is not None:
        class_map = dict(spec.class_map)
    elif spec.preset == "cifar10":
        class_map = dict(CIFAR10_ASYMMETRIC)
    elif spec.preset == "cifar100":
        class_map = cifar100_asymmetric_map(C)
    elif spec.preset is not None:
        raise ConfigurationError(f"Unknown asymmetric preset '{spec.preset}'", key="noise.preset")
    else:
        raise ConfigurationError("asymmetric noise requires class_map or preset", key="noise.class_map")

    targets = list(class_map.values())
    if len(set(targets)) != len(targets):
        raise ConfigurationError(f"class_map targets must be distinct: {class_map}", key="noise.class_map")
    for src, dst in class_map.items():
        if not (0 <= src < C and 0 <= dst < C):
            raise ConfigurationError(f"class_map entry {src}->{dst} outside [0, {C})", key="noise.class_map")
        if src == dst:
            raise ConfigurationError(f"class_map maps {src} onto itself", key="noise.class_map")
    return class_map


def build_transition(spec: NoiseSpec, C: int) -> TransitionMatrix:
    """
    Build the corruption kernel for a noise protocol.

    Args:
        spec: Noise kind, rate and (for asymmetric) class map or preset
        C: Number of classes (>= 2)

    Returns:
        TransitionMatrix whose row i is the distribution of the noisy label
        given clean label i

    Raises:
        ConfigurationError: Unknown kind, rate outside [0, 1], C < 2, or
            asymmetric noise without a usable class map
    """
    if spec.kind not in NOISE_KINDS:
        raise ConfigurationError(f"Unknown noise kind '{spec.kind}', expected one of {NOISE_KINDS}", key="noise.kind")
    if not 0.0 <= spec.rate <= 1.0:
        raise ConfigurationError(f"noise rate must be in [0, 1], got {spec.rate}", key="noise.rate")
    if C < 2:
        raise ConfigurationError(f"need at least 2 classes, got {C}")

    r = float(spec.rate)
    if spec.kind == "symmetric":
        probs = np.full((C, C), r / (C - 1))
        np.fill_diagonal(probs, 1.0 - r)
    elif spec.kind == "pairflip":
        probs = (1.0 - r) * np.eye(C)
        probs[np.arange(C), (np.arange(C) + 1) % C] += r
    else:
        probs = np.eye(C)
        for src, dst in _resolve_class_map(spec, C).items():
            probs[src, src] = 1.0 - r
            probs[src, dst] = r
    return TransitionMatrix(probs=probs)


def _sample_block(cum: np.ndarray, clean: np.ndarray, rng: RngStream) -> np.ndarray:
    u = rng.uniform(0.0, 1.0, clean.shape[0])
    rows = cum[clean]
    picks = (rows <= u[:, None]).sum(axis=1)
    # float round-off in the last cumulative entry
    return np.minimum(picks, cum.shape[1] - 1)


def inject_noise(ds: Dataset, T: TransitionMatrix, rng: RngStream, threads: int = 1) -> Dataset:
    """
    Corrupt labels by sampling noisy_labels[i] ~ T.probs[clean_labels[i]].

    The index space is cut into fixed blocks with one derived stream per block,
    so the result does not depend on `threads`.

    Returns:
        New Dataset sharing features and clean labels, with fresh noisy labels
    """
    if ds.num_classes != T.C:
        raise ConfigurationError(f"dataset has {ds.num_classes} classes, transition matrix {T.C}")
    cum = np.cumsum(T.probs, axis=1)
    starts = list(range(0, ds.n, _BLOCK))
    stream = rng.child("inject")

    def work(start: int) -> np.ndarray:
        clean = ds.clean_labels[start:start + _BLOCK]
        return _sample_block(cum, clean, stream.index_child(start // _BLOCK))

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(work, starts))
    else:
        blocks = [work(s) for s in starts]
    noisy = np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.int64)

    out = ds.with_noisy_labels(noisy.astype(np.int64))
    logger.info(f"Injected label noise: {out.corruption_mask.sum()}/{out.n} corrupted ({out.noise_fraction:.3f})")
    return out
