"""
Stochastic view generation for the self-supervised channel.
"""

import numpy as np

from relkd.exceptions import ConfigurationError
from relkd.models import AugSpec, ViewPair
from relkd.numerics.rng import RngStream

AUG_KINDS = ("jitter", "image")


def _jitter(x: np.ndarray, aug: AugSpec, rng: RngStream) -> np.ndarray:
    noisy = x + aug.sigma * rng.child("noise").normal(0.0, 1.0, x.shape) if aug.sigma > 0 else x.copy()
    keep = rng.child("mask").uniform(0.0, 1.0, x.shape) >= aug.mask_frac
    return noisy * keep


def _crop_flip(x: np.ndarray, aug: AugSpec, rng: RngStream) -> np.ndarray:
    if aug.image_shape is None:
        raise ConfigurationError("image augmentation needs image_shape (H, W, C)", key="ssl.aug.image_shape")
    h, w, c = aug.image_shape
    if x.shape[1] != h * w * c:
        raise ConfigurationError(f"row width {x.shape[1]} != H*W*C = {h * w * c}", key="ssl.aug.image_shape")
    p = aug.pad
    images = x.reshape(-1, h, w, c)
    padded = np.pad(images, ((0, 0), (p, p), (p, p), (0, 0)))
    offsets = rng.child("crop").integers(0, 2 * p + 1, (images.shape[0], 2))
    flips = rng.child("flip").uniform(0.0, 1.0, images.shape[0]) < 0.5
    out = np.empty_like(images)
    for i, (dy, dx) in enumerate(offsets):
        crop = padded[i, dy:dy + h, dx:dx + w, :]
        out[i] = crop[:, ::-1, :] if aug.flip and flips[i] else crop
    return out.reshape(x.shape[0], -1)


def augment_views(x: np.ndarray, aug: AugSpec, rng: RngStream) -> ViewPair:
    """
    Two independent stochastic transforms of the same rows.

    Vector data gets Gaussian jitter followed by random coordinate masking;
    flattened images get a padded random crop and a horizontal flip.

    Raises:
        ConfigurationError: Unknown augmentation kind or bad image shape
    """
    x = np.asarray(x, dtype=np.float64)
    if aug.kind == "jitter":
        transform = _jitter
    elif aug.kind == "image":
        transform = _crop_flip
    else:
        raise ConfigurationError(f"Unknown augmentation '{aug.kind}', expected one of {AUG_KINDS}", key="ssl.aug.kind")
    return ViewPair(v=transform(x, aug, rng.child("v")), v_prime=transform(x, aug, rng.child("v_prime")))
