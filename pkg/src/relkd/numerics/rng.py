"""
Seeded random streams with labelled, order-independent children.

A stream is identified by (seed, path). Children extend the path with a
stable hash of their label, so `root.child("noise")` yields the same draws
whether or not `root.child("init")` was created or consumed first.
"""

import hashlib

import numpy as np


def _label_key(label: str) -> int:
    """Stable 32-bit key for a child label (Python's hash() is salted)."""
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little")


class RngStream:
    """PCG64 generator addressed by a seed and a label path."""

    def __init__(self, seed: int, path: tuple[int, ...] = ()) -> None:
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self.seed = int(seed)
        self.path = tuple(path)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def child(self, label: str) -> "RngStream":
        """Derive an independent stream for `label`."""
        return RngStream(self.seed, self.path + (_label_key(label),))

    def index_child(self, index: int) -> "RngStream":
        """Derive a per-index stream (used to partition work across threads)."""
        return RngStream(self.seed, self.path + (int(index),))

    def normal(self, loc: float = 0.0, scale: float = 1.0, size=None) -> np.ndarray:
        return self.generator.normal(loc, scale, size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None) -> np.ndarray:
        return self.generator.uniform(low, high, size)

    def integers(self, low: int, high: int | None = None, size=None) -> np.ndarray:
        return self.generator.integers(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, path={self.path})"
