"""lfmdfn: light field spatial super-resolution with dynamic per-pixel filters."""

from .core import (
    DimensionError,
    FormatError,
    LfTransform,
    LightField4D,
    PlaneKind,
    apply_transform,
    bicubic_resample_sai,
    fold_to_plane,
    lf_metrics,
    load_lf,
    psnr,
    rgb_to_ycbcr,
    save_lf,
    ssim,
    unfold_from_plane,
    view_epi,
    view_microlens,
    view_sai,
    ycbcr_to_rgb,
)
from .autodiff import Tensor, grad_check, no_grad
from .model import (
    MDFNConfig,
    apply_dynamic_filters,
    build_params,
    count_parameters,
    forward,
    load_checkpoint,
    parameter_report,
    save_checkpoint,
    super_resolve,
)
from .training import TrainConfig, ingest_dataset, make_pair, train_loop
from .evaluation import MetricsReport, MetricsRow, evaluate_dataset
from .estimator import MDFNSuperResolver

__version__ = "0.1.0"

__all__ = [
    "DimensionError",
    "FormatError",
    "LfTransform",
    "LightField4D",
    "MDFNConfig",
    "MDFNSuperResolver",
    "MetricsReport",
    "MetricsRow",
    "PlaneKind",
    "Tensor",
    "TrainConfig",
    "apply_dynamic_filters",
    "apply_transform",
    "bicubic_resample_sai",
    "build_params",
    "count_parameters",
    "evaluate_dataset",
    "fold_to_plane",
    "forward",
    "grad_check",
    "ingest_dataset",
    "lf_metrics",
    "load_checkpoint",
    "load_lf",
    "make_pair",
    "no_grad",
    "parameter_report",
    "psnr",
    "rgb_to_ycbcr",
    "save_checkpoint",
    "save_lf",
    "ssim",
    "super_resolve",
    "train_loop",
    "unfold_from_plane",
    "view_epi",
    "view_microlens",
    "view_sai",
    "ycbcr_to_rgb",
    "__version__",
]
