"""Training configuration and the combined run-config file.

A run config is one key=value file holding both training and architecture
keys; ``r`` and ``seed`` are shared and populate both configs.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from ..kvconfig import ConfigError, apply_kv, dataclass_kv, format_kv, parse_kv
from ..model.config import MDFNConfig

_SHARED_KEYS = ("r", "seed")


@dataclass
class TrainConfig:
    """Training loop hyperparameters and bookkeeping knobs.

    ``crop_size`` is the LR patch size; HR targets are r times larger.
    ``deterministic`` zeroes the elapsed-time column of the loss log so
    repeated runs produce byte-identical logs.
    """

    crop_size: int = 24
    batch_size: int = 22
    r: int = 2
    iterations: int = 5000
    lr: float = 1e-4
    schedule: str = "none"
    seed: int = 0
    augment: bool = True
    dataset_root: str = ""
    checkpoint_interval: int = 1000
    deterministic: bool = False

    def validate(self) -> "TrainConfig":
        if self.crop_size < 1:
            raise ConfigError(f"crop_size must be positive, got {self.crop_size}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.r not in (2, 4):
            raise ConfigError(f"r must be 2 or 4, got {self.r}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if self.schedule != "none":
            raise ConfigError(f"only schedule=none is supported, got {self.schedule!r}")
        if self.checkpoint_interval < 1:
            raise ConfigError(
                f"checkpoint_interval must be >= 1, got {self.checkpoint_interval}"
            )
        return self

    def to_text(self) -> str:
        return format_kv(dataclass_kv(self))

    @classmethod
    def from_text(cls, text: str) -> "TrainConfig":
        return apply_kv(cls(), parse_kv(text)).validate()


def parse_run_config(text: str):
    """Split one key=value file into (TrainConfig, MDFNConfig).

    Keys are routed by name; ``r`` and ``seed`` go to both configs.
    Unknown keys are rejected.
    """
    kv = parse_kv(text)
    train_keys = {f.name for f in dataclasses.fields(TrainConfig)}
    model_keys = {f.name for f in dataclasses.fields(MDFNConfig)}
    train_kv, model_kv = {}, {}
    for key, val in kv.items():
        known = False
        if key in train_keys:
            train_kv[key] = val
            known = True
        if key in model_keys and (key in _SHARED_KEYS or key not in train_keys):
            model_kv[key] = val
            known = True
        if not known:
            raise ConfigError(
                f"unknown key {key!r} (expected one of {sorted(train_keys | model_keys)})"
            )
    train_cfg = apply_kv(TrainConfig(), train_kv).validate()
    model_cfg = apply_kv(MDFNConfig(), model_kv).validate()
    return train_cfg, model_cfg
