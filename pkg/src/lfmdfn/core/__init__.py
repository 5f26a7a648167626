from .lightfield import (
    DimensionError,
    LfTransform,
    LightField4D,
    PlaneKind,
    apply_transform,
    fold_to_plane,
    unfold_from_plane,
    view_epi,
    view_microlens,
    view_sai,
)
from .color import rgb_to_ycbcr, ycbcr_to_rgb
from .resample import bicubic_resample_sai, cubic_kernel, resample_axis, resize_image
from .metrics import lf_metrics, psnr, ssim
from .io import FormatError, load_lf, save_lf

__all__ = [
    "DimensionError",
    "FormatError",
    "LfTransform",
    "LightField4D",
    "PlaneKind",
    "apply_transform",
    "bicubic_resample_sai",
    "cubic_kernel",
    "fold_to_plane",
    "lf_metrics",
    "load_lf",
    "psnr",
    "resample_axis",
    "resize_image",
    "rgb_to_ycbcr",
    "save_lf",
    "ssim",
    "unfold_from_plane",
    "view_epi",
    "view_microlens",
    "view_sai",
    "ycbcr_to_rgb",
]
