"""Light field serialization.

Three interchangeable on-disk forms:

* raw ``.lf4d``: little-endian header (magic ``LF4D``, version u32, dims
  U, V, X, Y, C as u32) followed by the float32 payload in layout order;
* a directory of 8-bit per-view images named ``view_{u:02d}_{v:02d}.png``;
* a single 8-bit lenslet-grid ``.png`` of size (U*X, V*Y) with view (u, v)
  tiled at rows [u*X, (u+1)*X) and columns [v*Y, (v+1)*Y).

PNG forms quantize to 8 bits; the raw form is lossless for float32.
"""
from __future__ import annotations

import re
import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .lightfield import DimensionError, LightField4D

_MAGIC = b"LF4D"
_VERSION = 1
_VIEW_RE = re.compile(r"^view_(\d{2,})_(\d{2,})\.png$")


class FormatError(ValueError):
    """Malformed or inconsistent on-disk light field data."""


def _to_u8(img: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(np.clip(img, 0.0, 1.0) * 255.0), 0, 255).astype(np.uint8)


def _save_raw(lf: LightField4D, path: Path) -> None:
    u, v, x, y, c = lf.shape
    header = _MAGIC + struct.pack("<6I", _VERSION, u, v, x, y, c)
    payload = np.ascontiguousarray(lf.data, dtype="<f4")
    path.write_bytes(header + payload.tobytes())


def _load_raw(path: Path) -> LightField4D:
    blob = path.read_bytes()
    if len(blob) < 28 or blob[:4] != _MAGIC:
        raise FormatError(f"{path}: not a raw light field (bad magic)")
    version, u, v, x, y, c = struct.unpack("<6I", blob[4:28])
    if version != _VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    n = u * v * x * y * c
    if len(blob) != 28 + 4 * n:
        raise FormatError(f"{path}: payload length {len(blob) - 28} != {4 * n} expected")
    arr = np.frombuffer(blob, dtype="<f4", offset=28).reshape(u, v, x, y, c)
    return LightField4D(arr)


def _view_to_image(view: np.ndarray) -> Image.Image:
    q = _to_u8(view)
    if q.shape[-1] == 1:
        return Image.fromarray(q[..., 0], mode="L")
    if q.shape[-1] == 3:
        return Image.fromarray(q, mode="RGB")
    raise DimensionError(f"PNG output supports 1 or 3 channels, got {q.shape[-1]}")


def _save_view_dir(lf: LightField4D, path: Path) -> None:
    path.mkdir(parents=True, exist_ok=True)
    for u in range(lf.U):
        for v in range(lf.V):
            _view_to_image(lf.data[u, v]).save(path / f"view_{u:02d}_{v:02d}.png")


def _load_view_dir(path: Path) -> LightField4D:
    found = {}
    for p in path.iterdir():
        m = _VIEW_RE.match(p.name)
        if m:
            found[(int(m.group(1)), int(m.group(2)))] = p
    if not found:
        raise FormatError(f"{path}: no view_UU_VV.png files found")
    nu = max(k[0] for k in found) + 1
    nv = max(k[1] for k in found) + 1
    views = []
    shape0 = None
    for u in range(nu):
        for v in range(nv):
            p = found.get((u, v))
            if p is None:
                raise FormatError(f"{path}: missing view ({u}, {v}) of a {nu}x{nv} grid")
            img = np.asarray(Image.open(p))
            if img.ndim == 2:
                img = img[..., None]
            if shape0 is None:
                shape0 = img.shape
            elif img.shape != shape0:
                raise FormatError(
                    f"{path}: view ({u}, {v}) has shape {img.shape}, expected {shape0}"
                )
            views.append(img)
    arr = np.stack(views).reshape(nu, nv, *shape0)
    return LightField4D(arr.astype(np.float32) / 255.0)


def _save_grid(lf: LightField4D, path: Path) -> None:
    u, v, x, y, c = lf.shape
    grid = lf.data.transpose(0, 2, 1, 3, 4).reshape(u * x, v * y, c)
    _view_to_image(grid).save(path)


def _load_grid(path: Path, angular) -> LightField4D:
    if angular is None:
        raise FormatError(f"{path}: loading a lenslet grid requires angular=(U, V)")
    nu, nv = angular
    img = np.asarray(Image.open(path))
    if img.ndim == 2:
        img = img[..., None]
    h, w, c = img.shape
    if h % nu or w % nv:
        raise FormatError(f"{path}: grid {h}x{w} not divisible by angular {nu}x{nv}")
    x, y = h // nu, w // nv
    arr = img.reshape(nu, x, nv, y, c).transpose(0, 2, 1, 3, 4)
    return LightField4D(arr.astype(np.float32) / 255.0)


def save_lf(lf: LightField4D, path) -> None:
    """Write a light field; the format is chosen by the path suffix.

    ``.lf4d`` selects the raw float32 form, ``.png`` a single lenslet
    grid, anything else a directory of per-view images.
    """
    path = Path(path)
    if path.suffix == ".lf4d":
        _save_raw(lf, path)
    elif path.suffix == ".png":
        _save_grid(lf, path)
    else:
        _save_view_dir(lf, path)


def load_lf(path, angular=None) -> LightField4D:
    """Read a light field saved by :func:`save_lf`.

    ``angular`` is only consulted for single lenslet-grid images, whose
    header carries no angular dimensions.
    """
    path = Path(path)
    if path.is_dir():
        return _load_view_dir(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    if path.suffix == ".lf4d":
        return _load_raw(path)
    if path.suffix == ".png":
        return _load_grid(path, angular)
    raise FormatError(f"{path}: unrecognized light field format")
