"""Per-pixel dynamic filtering over the angular plane.

Each HR output pixel (u, v, r*x + dx, r*y + dy) is a d x d weighted sum of
the LR pixel (x, y) seen from neighboring views:

    out[u, v, r*x+dx, r*y+dy] =
        sum_{i,j} filters[u, v, r*x+dx, r*y+dy, i, j] * lr[u+i-d//2, v+j-d//2, x, y]

so the window slides over the micro-lens (angular) image at a fixed spatial
position; angular taps outside the grid read zero.  Tap (i, j) indexes the
u and v offsets respectively, row-major.  Differentiable with respect to
both the filter field and the light field.
"""
from __future__ import annotations

import numpy as np

from ..autodiff.tensor import Tensor
from ..core.lightfield import DimensionError, LightField4D


def _as_tensor(x, ndim, name):
    if isinstance(x, LightField4D):
        if x.C != 1:
            raise DimensionError(f"{name}: expected a single-channel light field, got C={x.C}")
        x = x.data[..., 0]
    if not isinstance(x, Tensor):
        x = Tensor(np.asarray(x))
    if x.ndim != ndim:
        raise DimensionError(f"{name}: expected {ndim}D, got shape {x.shape}")
    return x


def apply_dynamic_filters(filters, lf) -> Tensor:
    """Filter field (U, V, rX, rY, d, d) applied to an LR field (U, V, X, Y).

    The upscale factor r is inferred from the spatial ratio and may be any
    positive integer.  Returns an (U, V, rX, rY) tensor.
    """
    f = _as_tensor(filters, 6, "filters")
    x = _as_tensor(lf, 4, "light field")
    nu, nv, rx, ry, d, d2 = f.shape
    nu2, nv2, nx, ny = x.shape
    if (nu, nv) != (nu2, nv2):
        raise DimensionError(f"angular dims differ: filters {nu}x{nv}, light field {nu2}x{nv2}")
    if d != d2 or d % 2 == 0:
        raise DimensionError(f"filter taps must be square with odd size, got {d}x{d2}")
    if rx % nx or ry % ny or rx // nx != ry // ny:
        raise DimensionError(
            f"spatial dims {rx}x{ry} are not an integer multiple of {nx}x{ny}"
        )
    r = rx // nx
    off = d // 2
    dtype = np.result_type(f.dtype, x.dtype)

    # Nearest-neighbor expand each view to HR, then pad the angular plane.
    xup = x.data.repeat(r, axis=2).repeat(r, axis=3)
    xpad = np.zeros((nu + d - 1, nv + d - 1, rx, ry), dtype=dtype)
    xpad[off : off + nu, off : off + nv] = xup

    fd = f.data
    out = np.zeros((nu, nv, rx, ry), dtype=dtype)
    for i in range(d):
        for j in range(d):
            out += fd[:, :, :, :, i, j] * xpad[i : i + nu, j : j + nv]

    def bwd(g):
        if f.requires_grad:
            df = np.empty_like(fd)
            for i in range(d):
                for j in range(d):
                    df[:, :, :, :, i, j] = g * xpad[i : i + nu, j : j + nv]
            f._accum(df)
        if x.requires_grad:
            dpad = np.zeros_like(xpad)
            for i in range(d):
                for j in range(d):
                    dpad[i : i + nu, j : j + nv] += g * fd[:, :, :, :, i, j]
            dup = dpad[off : off + nu, off : off + nv]
            dx = dup.reshape(nu, nv, nx, r, ny, r).sum(axis=(3, 5))
            x._accum(dx)

    return Tensor._make(out, (f, x), bwd)
