"""Network configuration."""
from __future__ import annotations

from dataclasses import dataclass

from ..kvconfig import ConfigError, apply_kv, dataclass_kv, format_kv, parse_kv

VARIANTS = ("full", "sa_only", "epi_only")
UPSAMPLERS = ("dynamic_filter", "deconvolution")

# Friendlier spellings accepted in config files.
_ALIASES = {
    "saonly": "sa_only",
    "epionly": "epi_only",
    "dynamicfilter": "dynamic_filter",
}


def _canon(value: str, allowed, what: str) -> str:
    low = value.strip().lower()
    low = _ALIASES.get(low.replace("_", ""), low)
    if low not in allowed:
        raise ConfigError(f"{what} must be one of {allowed}, got {value!r}")
    return low


@dataclass
class MDFNConfig:
    """Architecture hyperparameters.

    n blocks of c channels feed a dynamic-filter branch (d x d filters per
    output pixel) and a residual branch; r is the spatial upscale factor.
    ``variant`` restricts which folded-plane branches the blocks use and
    ``upsampler`` swaps the dynamic-filter path for a per-view transposed
    convolution.
    """

    n: int = 8
    c: int = 80
    d: int = 5
    r: int = 2
    variant: str = "full"
    upsampler: str = "dynamic_filter"
    branch_kernel: int = 3
    dfb_mid_channels: int = 64
    rb_mid_channels: int = 32
    seed: int = 0

    def branches(self):
        if self.variant == "full":
            return ("sai", "mlens", "epih", "epiv")
        if self.variant == "sa_only":
            return ("sai", "mlens")
        return ("epih", "epiv")

    def validate(self) -> "MDFNConfig":
        self.variant = _canon(self.variant, VARIANTS, "variant")
        self.upsampler = _canon(self.upsampler, UPSAMPLERS, "upsampler")
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        nb = len(self.branches())
        if self.c < nb or self.c % nb:
            raise ConfigError(f"c={self.c} must be divisible by the {nb} active branches")
        if self.d < 1 or self.d % 2 == 0:
            raise ConfigError(f"d must be odd and positive, got {self.d}")
        if self.r not in (2, 4):
            raise ConfigError(f"r must be 2 or 4, got {self.r}")
        if self.branch_kernel < 1 or self.branch_kernel % 2 == 0:
            raise ConfigError(f"branch_kernel must be odd and positive, got {self.branch_kernel}")
        if self.dfb_mid_channels < 1 or self.rb_mid_channels < 1:
            raise ConfigError("mid channel counts must be positive")
        return self

    def to_text(self) -> str:
        return format_kv(dataclass_kv(self))

    @classmethod
    def from_text(cls, text: str) -> "MDFNConfig":
        cfg = apply_kv(cls(), parse_kv(text))
        return cfg.validate()
