from .config import MDFNConfig, UPSAMPLERS, VARIANTS
from .dynfilter import apply_dynamic_filters
from .network import (
    build_params,
    count_parameters,
    dfb_forward,
    forward,
    mdfb_forward,
    mdfn_features,
    parameter_report,
    rb_forward,
    super_resolve,
)
from .checkpoint import CheckpointData, load_checkpoint, save_checkpoint

__all__ = [
    "CheckpointData",
    "MDFNConfig",
    "UPSAMPLERS",
    "VARIANTS",
    "apply_dynamic_filters",
    "build_params",
    "count_parameters",
    "dfb_forward",
    "forward",
    "load_checkpoint",
    "mdfb_forward",
    "mdfn_features",
    "parameter_report",
    "rb_forward",
    "save_checkpoint",
    "super_resolve",
]
