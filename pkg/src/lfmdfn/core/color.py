"""BT.601 studio-swing color conversion on [0, 1] floats.

Luma maps black to 16/255 and white to 235/255; chroma is centered on
128/255.  The inverse matrix is the exact numerical inverse of the forward
one, so a round trip is lossless up to float precision.
"""
from __future__ import annotations

import numpy as np

from .lightfield import DimensionError

# Rows produce Y, Cb, Cr from (R, G, B) in [0, 1].
_FWD = np.array(
    [
        [65.481, 128.553, 24.966],
        [-37.797, -74.203, 112.0],
        [112.0, -93.786, -18.214],
    ],
    dtype=np.float64,
) / 255.0
_OFFSET = np.array([16.0, 128.0, 128.0], dtype=np.float64) / 255.0
_INV = np.linalg.inv(_FWD)


def _check_rgbish(img, name):
    img = np.asarray(img)
    if img.ndim < 1 or img.shape[-1] != 3:
        raise DimensionError(f"{name} expects a trailing axis of 3 channels, got shape {img.shape}")
    return img


def rgb_to_ycbcr(img: np.ndarray) -> np.ndarray:
    """Convert (..., 3) RGB in [0, 1] to studio-swing YCbCr in [0, 1]."""
    img = _check_rgbish(img, "rgb_to_ycbcr")
    out = img.astype(np.float64, copy=False) @ _FWD.T + _OFFSET
    return out.astype(np.float32) if img.dtype != np.float64 else out


def ycbcr_to_rgb(img: np.ndarray) -> np.ndarray:
    """Inverse of :func:`rgb_to_ycbcr`; output is not clipped."""
    img = _check_rgbish(img, "ycbcr_to_rgb")
    out = (img.astype(np.float64, copy=False) - _OFFSET) @ _INV.T
    return out.astype(np.float32) if img.dtype != np.float64 else out


def luma(img: np.ndarray) -> np.ndarray:
    """Y channel only, shape (...,) for a (..., 3) RGB input."""
    return rgb_to_ycbcr(img)[..., 0]
