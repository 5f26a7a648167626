"""4D light field container and its 2D re-foldings.

A dense light field I(u, v, x, y) is stored row-major as (U, V, X, Y, C)
with (u, v) indexing the angular plane and (x, y) the spatial plane.  The
same volume can be read as four different stacks of 2D images: sub-aperture
images, micro-lens images, and the two epipolar plane image families.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Shape or index inconsistent with the 4D light field contract."""


class PlaneKind(enum.Enum):
    """The four 2D slicings of a 4D light field.

    SAI             fix (u, v), image over (x, y)
    MICRO_LENS      fix (x, y), image over (u, v)
    EPI_HORIZONTAL  fix (u, x), image over (v, y)
    EPI_VERTICAL    fix (v, y), image over (u, x)
    """

    SAI = "sai"
    MICRO_LENS = "microlens"
    EPI_HORIZONTAL = "epi_h"
    EPI_VERTICAL = "epi_v"


class LightField4D:
    """Immutable dense 4D light field with a trailing channel axis.

    Parameters
    ----------
    data : array_like
        Array of shape (U, V, X, Y, C) or (U, V, X, Y); the latter is
        promoted to a single channel.  Stored as float32 unless the input
        is already float64.  All values must be finite.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data)
        if arr.ndim == 4:
            arr = arr[..., None]
        if arr.ndim != 5:
            raise DimensionError(
                f"light field data must be 4D or 5D (u, v, x, y[, c]), got ndim={arr.ndim}"
            )
        if any(s < 1 for s in arr.shape):
            raise DimensionError(f"light field axes must be non-empty, got shape {arr.shape}")
        if arr.dtype != np.float64:
            arr = arr.astype(np.float32, copy=False)
        if not np.isfinite(arr).all():
            raise ValueError("light field contains non-finite values")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("LightField4D is immutable")

    @property
    def shape(self):
        return self.data.shape

    @property
    def U(self):
        return self.data.shape[0]

    @property
    def V(self):
        return self.data.shape[1]

    @property
    def X(self):
        return self.data.shape[2]

    @property
    def Y(self):
        return self.data.shape[3]

    @property
    def C(self):
        return self.data.shape[4]

    def __repr__(self):
        u, v, x, y, c = self.shape
        return f"LightField4D(U={u}, V={v}, X={x}, Y={y}, C={c}, dtype={self.data.dtype})"


def _check_index(name, idx, size):
    if not 0 <= idx < size:
        raise IndexError(f"{name}={idx} out of range [0, {size})")


def view_sai(lf: LightField4D, u: int, v: int) -> np.ndarray:
    """Sub-aperture image I(u, v, :, :) as an (X, Y, C) array."""
    _check_index("u", u, lf.U)
    _check_index("v", v, lf.V)
    return lf.data[u, v]


def view_microlens(lf: LightField4D, x: int, y: int) -> np.ndarray:
    """Micro-lens image I(:, :, x, y) as a (U, V, C) array."""
    _check_index("x", x, lf.X)
    _check_index("y", y, lf.Y)
    return lf.data[:, :, x, y]


def view_epi(lf: LightField4D, kind: PlaneKind, a: int, b: int) -> np.ndarray:
    """Epipolar plane image.

    EPI_HORIZONTAL fixes (u=a, x=b) and returns a (V, Y, C) slice;
    EPI_VERTICAL fixes (v=a, y=b) and returns a (U, X, C) slice.
    """
    if kind == PlaneKind.EPI_HORIZONTAL:
        _check_index("u", a, lf.U)
        _check_index("x", b, lf.X)
        return lf.data[a, :, b, :]
    if kind == PlaneKind.EPI_VERTICAL:
        _check_index("v", a, lf.V)
        _check_index("y", b, lf.Y)
        return lf.data[:, a, :, b]
    raise ValueError(f"view_epi expects an EPI plane kind, got {kind}")


# Per plane kind: axis order (fixed_a, fixed_b, image_h, image_w) over (u, v, x, y).
_FOLD_AXES = {
    PlaneKind.SAI: (0, 1, 2, 3),
    PlaneKind.MICRO_LENS: (2, 3, 0, 1),
    PlaneKind.EPI_HORIZONTAL: (0, 2, 1, 3),
    PlaneKind.EPI_VERTICAL: (1, 3, 0, 2),
}


def fold_to_plane(lf: LightField4D, kind: PlaneKind) -> np.ndarray:
    """Fold a light field into a batch of 2D images for the given plane.

    Returns an (B, C, H, W) array where B runs lexicographically over the
    two fixed indices of the plane (e.g. b = u * V + v for SAI), and (H, W)
    are the two free indices.
    """
    a0, a1, h, w = _FOLD_AXES[kind]
    arr = lf.data.transpose(a0, a1, 4, h, w)
    s = arr.shape
    return np.ascontiguousarray(arr).reshape(s[0] * s[1], s[2], s[3], s[4])


def unfold_from_plane(batch: np.ndarray, kind: PlaneKind, dims) -> LightField4D:
    """Inverse of :func:`fold_to_plane`.

    ``dims`` is the original (U, V, X, Y); the channel count is taken from
    the batch.
    """
    u, v, x, y = dims
    batch = np.asarray(batch)
    if batch.ndim != 4:
        raise DimensionError(f"plane batch must be (B, C, H, W), got ndim={batch.ndim}")
    a0, a1, h, w = _FOLD_AXES[kind]
    full = (u, v, x, y)
    want = (full[a0] * full[a1], batch.shape[1], full[h], full[w])
    if (batch.shape[0], batch.shape[2], batch.shape[3]) != (want[0], want[2], want[3]):
        raise DimensionError(
            f"plane batch shape {batch.shape} does not match dims {dims} for {kind}"
        )
    arr = batch.reshape(full[a0], full[a1], batch.shape[1], full[h], full[w])
    # Invert the transpose (a0, a1, 4, h, w) -> identity order.
    perm = (a0, a1, 4, h, w)
    inv = [0] * 5
    for i, p in enumerate(perm):
        inv[p] = i
    return LightField4D(arr.transpose(inv))


@dataclass(frozen=True)
class LfTransform:
    """Joint angular plus spatial symmetry of a light field.

    ``rotation`` is a multiple of 90 degrees applied to both planes at
    once, followed by a horizontal flip (v and y axes) and then a vertical
    flip (u and x axes).  The 16 distinct combinations form the
    augmentation group used during training.
    """

    rotation: int = 0
    flip_h: bool = False
    flip_v: bool = False

    def __post_init__(self):
        if self.rotation not in (0, 90, 180, 270):
            raise ValueError(f"rotation must be one of 0/90/180/270, got {self.rotation}")

    @staticmethod
    def group():
        """All 16 transforms: 4 rotations x 2 horizontal x 2 vertical flips."""
        return [
            LfTransform(rot, fh, fv)
            for rot, fh, fv in itertools.product((0, 90, 180, 270), (False, True), (False, True))
        ]


def _rot90_once(arr: np.ndarray) -> np.ndarray:
    # (u, v, x, y) -> (v, U-1-u, y, X-1-x), channels untouched.
    return arr.transpose(1, 0, 3, 2, 4)[:, ::-1, :, ::-1, :]


def apply_transform(lf: LightField4D, t: LfTransform) -> LightField4D:
    """Apply a joint angular/spatial symmetry transform.

    90 and 270 degree rotations require a square angular grid (U == V) and
    a square spatial grid (X == Y); flips and 180 degrees do not.
    """
    arr = lf.data
    k = t.rotation // 90
    if k % 2 == 1 and (lf.U != lf.V or lf.X != lf.Y):
        raise DimensionError(
            f"rotation {t.rotation} requires square angular and spatial grids, "
            f"got U={lf.U} V={lf.V} X={lf.X} Y={lf.Y}"
        )
    for _ in range(k):
        arr = _rot90_once(arr)
    if t.flip_h:
        arr = arr[:, ::-1, :, ::-1, :]
    if t.flip_v:
        arr = arr[::-1, :, ::-1, :, :]
    return LightField4D(arr)
