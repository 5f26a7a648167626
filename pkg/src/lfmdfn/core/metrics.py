"""Fidelity metrics: PSNR and single-scale SSIM.

SSIM follows the standard single-scale formulation: 11x11 Gaussian window
with sigma 1.5, K1 = 0.01, K2 = 0.03, statistics over valid window
positions only.  Light-field metrics average the per-view scores of the
luma channel across all sub-aperture images.
"""
from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .color import rgb_to_ycbcr
from .lightfield import DimensionError, LightField4D

_WIN = 11
_SIGMA = 1.5
_K1 = 0.01
_K2 = 0.03


def psnr(ref: np.ndarray, test: np.ndarray, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; identical inputs give +inf."""
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise DimensionError(f"shape mismatch: {ref.shape} vs {test.shape}")
    if peak <= 0:
        raise ValueError(f"peak must be positive, got {peak}")
    mse = np.mean((ref - test) ** 2)
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _gauss_window() -> np.ndarray:
    i = np.arange(_WIN, dtype=np.float64) - (_WIN - 1) / 2.0
    g = np.exp(-(i * i) / (2.0 * _SIGMA * _SIGMA))
    return g / g.sum()


_G = _gauss_window()


def _filter_valid(img: np.ndarray) -> np.ndarray:
    # Separable Gaussian over valid positions: (H, W) -> (H-10, W-10).
    t = sliding_window_view(img, _WIN, axis=1) @ _G
    return sliding_window_view(t, _WIN, axis=0) @ _G


def ssim(ref: np.ndarray, test: np.ndarray, data_range: float = 1.0) -> float:
    """Mean single-scale SSIM of two single-channel 2D images."""
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.ndim == 3 and ref.shape[-1] == 1:
        ref = ref[..., 0]
    if test.ndim == 3 and test.shape[-1] == 1:
        test = test[..., 0]
    if ref.ndim != 2 or test.ndim != 2:
        raise DimensionError(f"ssim expects 2D images, got {ref.shape} and {test.shape}")
    if ref.shape != test.shape:
        raise DimensionError(f"shape mismatch: {ref.shape} vs {test.shape}")
    if min(ref.shape) < _WIN:
        raise DimensionError(f"image {ref.shape} smaller than the {_WIN}x{_WIN} window")
    c1 = (_K1 * data_range) ** 2
    c2 = (_K2 * data_range) ** 2
    mu_x = _filter_valid(ref)
    mu_y = _filter_valid(test)
    xx = _filter_valid(ref * ref) - mu_x * mu_x
    yy = _filter_valid(test * test) - mu_y * mu_y
    xy = _filter_valid(ref * test) - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * xy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (xx + yy + c2)
    return float(np.mean(num / den))


def _to_luma_views(lf: LightField4D) -> np.ndarray:
    if lf.C == 1:
        return lf.data[..., 0]
    if lf.C == 3:
        return rgb_to_ycbcr(lf.data)[..., 0]
    raise DimensionError(f"metrics expect 1 or 3 channels, got C={lf.C}")


def lf_metrics(ref: LightField4D, test: LightField4D):
    """Mean (PSNR, SSIM) of the luma channel over all sub-aperture views.

    Views are visited in (u, v) index order; means are plain arithmetic
    averages, so the result is deterministic for fixed inputs.
    """
    if ref.shape != test.shape:
        raise DimensionError(f"shape mismatch: {ref.shape} vs {test.shape}")
    ry = _to_luma_views(ref)
    ty = _to_luma_views(test)
    ps, ss = [], []
    for u in range(ref.U):
        for v in range(ref.V):
            ps.append(psnr(ry[u, v], ty[u, v]))
            ss.append(ssim(ry[u, v], ty[u, v]))
    return float(np.mean(ps)), float(np.mean(ss))
