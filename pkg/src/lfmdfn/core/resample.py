"""Separable bicubic resampling with the Keys kernel (a = -0.5).

Sample positions use the half-pixel convention x_in = (i_out + 0.5) / s - 0.5.
When downscaling, the kernel is widened by the scale factor (antialias) and
edges are handled by clamping source indices (replicate) with per-output
weight normalization.  Weights are computed in float64 and applied one axis
at a time as a dense matrix product.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .lightfield import DimensionError, LightField4D

_A = -0.5  # Keys cubic parameter


def cubic_kernel(t: np.ndarray) -> np.ndarray:
    """Keys piecewise-cubic kernel W(t), support (-2, 2)."""
    t = np.abs(np.asarray(t, dtype=np.float64))
    t2 = t * t
    t3 = t2 * t
    out = np.where(
        t <= 1.0,
        (_A + 2.0) * t3 - (_A + 3.0) * t2 + 1.0,
        _A * t3 - 5.0 * _A * t2 + 8.0 * _A * t - 4.0 * _A,
    )
    return np.where(t < 2.0, out, 0.0)


def resample_weights(n_in: int, n_out: int) -> np.ndarray:
    """Dense (n_out, n_in) float64 weight matrix for one axis."""
    if n_in < 1 or n_out < 1:
        raise DimensionError(f"axis sizes must be positive, got {n_in} -> {n_out}")
    s = n_out / n_in
    kscale = min(s, 1.0)
    support = 2.0 / kscale
    w = np.zeros((n_out, n_in), dtype=np.float64)
    for o in range(n_out):
        x = (o + 0.5) / s - 0.5
        k0 = int(np.ceil(x - support))
        k1 = int(np.floor(x + support))
        ks = np.arange(k0, k1 + 1)
        vals = cubic_kernel((x - ks) * kscale)
        np.add.at(w[o], np.clip(ks, 0, n_in - 1), vals)
        tot = w[o].sum()
        if tot != 0.0:
            w[o] /= tot
    return w


def resample_axis(arr: np.ndarray, axis: int, n_out: int) -> np.ndarray:
    """Resample one axis of an array; computation in float64."""
    arr = np.asarray(arr)
    w = resample_weights(arr.shape[axis], n_out)
    out = np.tensordot(w, arr.astype(np.float64, copy=False), axes=([1], [axis]))
    # tensordot puts the new axis first; move it back.
    return np.moveaxis(out, 0, axis)


def resize_image(img: np.ndarray, out_hw) -> np.ndarray:
    """Bicubic resize of an (H, W) or (H, W, C) image to (out_h, out_w)."""
    img = np.asarray(img)
    if img.ndim not in (2, 3):
        raise DimensionError(f"resize_image expects (H, W[, C]), got shape {img.shape}")
    oh, ow = out_hw
    out = resample_axis(img, 0, oh)
    out = resample_axis(out, 1, ow)
    return out.astype(np.float32) if img.dtype != np.float64 else out


def _scaled_size(n: int, scale: Fraction, name: str) -> int:
    m = n * scale
    if m.denominator != 1 or m.numerator < 1:
        raise DimensionError(f"{name}={n} is not divisible for scale {scale}")
    return m.numerator


def bicubic_resample_sai(lf: LightField4D, scale) -> LightField4D:
    """Resample every sub-aperture image by a rational spatial factor.

    ``scale`` may be an int, Fraction, or float exactly representing a
    rational (e.g. 2, 0.5, Fraction(1, 4)).  Downscaling requires the
    spatial sizes to be divisible so the output grid is integral.
    """
    frac = Fraction(scale).limit_denominator(1_000_000)
    if abs(float(frac) - float(scale)) > 1e-12 or frac <= 0:
        raise ValueError(f"scale must be a positive rational, got {scale!r}")
    ox = _scaled_size(lf.X, frac, "X")
    oy = _scaled_size(lf.Y, frac, "Y")
    out = resample_axis(lf.data, 2, ox)
    out = resample_axis(out, 3, oy)
    return LightField4D(out.astype(lf.data.dtype))
