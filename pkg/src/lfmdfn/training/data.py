"""Dataset ingestion, degradation caching, and patch sampling.

Light fields are loaded from a root directory (raw ``.lf4d`` files or
per-view image directories), center-cropped to a 7x7 angular grid, reduced
to luma, spatially cropped to the largest r-divisible region (top-left
anchored), and degraded once; the LR copy is cached on disk keyed by a
content hash.  Patches are cut from the degraded pair at aligned origins,
so every LR patch is exactly the degradation of its HR partner's full
context (crop-then-degrade equals degrade-then-crop only away from crop
borders; cutting after degradation sidesteps the border question).
"""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..core.color import rgb_to_ycbcr
from ..core.io import load_lf, save_lf
from ..core.lightfield import LfTransform, LightField4D, apply_transform
from ..core.resample import bicubic_resample_sai
from .config import TrainConfig

ANGULAR = 7  # fixed angular crop, views are center-cropped to this size


class DatasetError(ValueError):
    """Problem with a dataset root or one of its light fields."""


class AngularResolutionError(DatasetError):
    """A light field has fewer angular views than required."""


def _to_luma_lf(lf: LightField4D) -> LightField4D:
    if lf.C == 1:
        return lf
    if lf.C == 3:
        return LightField4D(rgb_to_ycbcr(lf.data)[..., :1])
    raise DatasetError(f"expected 1 or 3 channels, got C={lf.C}")


def _center_crop_angular(lf: LightField4D, n: int = ANGULAR) -> LightField4D:
    if lf.U < n or lf.V < n:
        raise AngularResolutionError(
            f"angular resolution {lf.U}x{lf.V} below the required {n}x{n}"
        )
    u0 = (lf.U - n) // 2
    v0 = (lf.V - n) // 2
    return LightField4D(lf.data[u0 : u0 + n, v0 : v0 + n])


def make_pair(lf_hr: LightField4D, r: int):
    """(lf_lr, lf_hr) luma pair; HR is cropped to the largest r-divisible
    spatial region (top-left anchored) before bicubic 1/r degradation."""
    if r < 1:
        raise ValueError(f"r must be positive, got {r}")
    lf_hr = _to_luma_lf(lf_hr)
    nx = lf_hr.X - lf_hr.X % r
    ny = lf_hr.Y - lf_hr.Y % r
    if nx < r or ny < r:
        raise DatasetError(f"spatial dims {lf_hr.X}x{lf_hr.Y} too small for r={r}")
    if (nx, ny) != (lf_hr.X, lf_hr.Y):
        lf_hr = LightField4D(lf_hr.data[:, :, :nx, :ny])
    lf_lr = bicubic_resample_sai(lf_hr, Fraction(1, r))
    return lf_lr, lf_hr


@dataclass
class DatasetEntry:
    name: str
    hr: LightField4D  # (7, 7, X, Y) single-channel luma
    lr: LightField4D  # (7, 7, X/r, Y/r)


class LfDataset:
    """Indexed collection of degraded (LR, HR) light field pairs."""

    def __init__(self, entries, r: int):
        self.entries = list(entries)
        self.r = r

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i) -> DatasetEntry:
        return self.entries[i]


def default_cache_dir() -> Path:
    env = os.environ.get("LFMDFN_CACHE")
    return Path(env) if env else Path.home() / ".cache" / "lfmdfn"


def _cached_degrade(hr: LightField4D, r: int, cache_dir) -> LightField4D:
    if cache_dir is None:
        return bicubic_resample_sai(hr, Fraction(1, r))
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    key = hashlib.sha256(hr.data.tobytes() + f"|keys-0.5|aa|r={r}".encode()).hexdigest()[:24]
    path = cache_dir / f"{key}.lf4d"
    if path.exists():
        return load_lf(path)
    lr = bicubic_resample_sai(hr, Fraction(1, r))
    save_lf(lr, path)
    return lr


def _scan_root(root: Path):
    items = []
    for p in sorted(root.iterdir()):
        if p.suffix == ".lf4d" and p.is_file():
            items.append(p)
        elif p.is_dir() and any(c.name.startswith("view_") for c in p.iterdir()):
            items.append(p)
    return items


def ingest_dataset(root, r: int, cache_dir=None) -> LfDataset:
    """Load, validate, and degrade every light field under ``root``.

    Accepts ``.lf4d`` files and per-view image directories.  Each field is
    center-cropped to 7x7 views; smaller angular grids are rejected.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} is not a directory")
    items = _scan_root(root)
    if not items:
        raise DatasetError(f"no light fields found under {root}")
    if cache_dir is None:
        cache_dir = default_cache_dir()
    entries = []
    for p in items:
        try:
            lf = load_lf(p)
        except Exception as e:
            raise DatasetError(f"{p.name}: unreadable light field ({e})") from e
        lf = _center_crop_angular(lf)
        lf = _to_luma_lf(lf)
        nx, ny = lf.X - lf.X % r, lf.Y - lf.Y % r
        if (nx, ny) != (lf.X, lf.Y):
            lf = LightField4D(lf.data[:, :, :nx, :ny])
        lr = _cached_degrade(lf, r, cache_dir)
        entries.append(DatasetEntry(name=p.stem, hr=lf, lr=lr))
    return LfDataset(entries, r)


@dataclass
class PatchSample:
    lr_patch: LightField4D  # (7, 7, crop, crop)
    hr_patch: LightField4D  # (7, 7, r*crop, r*crop)
    source: str
    origin: tuple  # (x0, y0) on the LR grid
    transform: LfTransform


def sample_batch(dataset: LfDataset, cfg: TrainConfig, rng: np.random.Generator):
    """Draw ``batch_size`` aligned patch pairs; deterministic under ``rng``.

    Crops are uniform over LFs and LR origins (HR origin = r * LR origin);
    with augmentation on, a transform is drawn uniformly from the
    16-element symmetry group and applied to both patches.
    """
    if len(dataset) == 0:
        raise DatasetError("empty dataset")
    r = dataset.r
    cs = cfg.crop_size
    batch = []
    for _ in range(cfg.batch_size):
        entry = dataset[int(rng.integers(len(dataset)))]
        max_x = entry.lr.X - cs
        max_y = entry.lr.Y - cs
        if max_x < 0 or max_y < 0:
            raise DatasetError(
                f"{entry.name}: LR spatial dims {entry.lr.X}x{entry.lr.Y} below crop {cs}"
            )
        x0 = int(rng.integers(max_x + 1))
        y0 = int(rng.integers(max_y + 1))
        lr = LightField4D(entry.lr.data[:, :, x0 : x0 + cs, y0 : y0 + cs])
        hr = LightField4D(
            entry.hr.data[:, :, r * x0 : r * (x0 + cs), r * y0 : r * (y0 + cs)]
        )
        if cfg.augment:
            t = LfTransform(
                rotation=90 * int(rng.integers(4)),
                flip_h=bool(rng.integers(2)),
                flip_v=bool(rng.integers(2)),
            )
        else:
            t = LfTransform()
        if t != LfTransform():
            lr = apply_transform(lr, t)
            hr = apply_transform(hr, t)
        batch.append(PatchSample(lr_patch=lr, hr_patch=hr, source=entry.name,
                                 origin=(x0, y0), transform=t))
    return batch
