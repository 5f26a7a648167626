"""Differentiable structured ops: convolutions, shuffles, activations, loss.

conv2d uses exact cross-correlation semantics (no kernel flip) with zero
padding and stride 1; the transposed convolution carries the stride and is
built by composition (zero-stuffing, axis swap, spatial flip, conv2d), so
its backward pass comes for free and the adjoint identity
``<conv2d(x, w), y> == <x, conv_transpose2d(y, w)>`` holds by construction.

The convolution is an im2col + GEMM: patches are gathered tap by tap into a
(C*kh*kw, N*Ho*Wo) matrix and hit with the reshaped weights.  The backward
pass recomputes the patch matrix instead of caching it, trading FLOPs for
memory.
"""
from __future__ import annotations

import numpy as np

from .tensor import Tensor


def _pair(v):
    if isinstance(v, (tuple, list)):
        a, b = v
        return int(a), int(b)
    return int(v), int(v)


def _pad2d(arr: np.ndarray, ph: int, pw: int) -> np.ndarray:
    if ph == 0 and pw == 0:
        return arr
    n, c, h, w = arr.shape
    out = np.zeros((n, c, h + 2 * ph, w + 2 * pw), dtype=arr.dtype)
    out[:, :, ph : ph + h, pw : pw + w] = arr
    return out


# Scratch buffers for patch matrices, reused across calls.  Execution is
# single-threaded and every caller consumes its matrix before the next
# conv runs, so recycling by shape is safe and avoids re-faulting tens of
# megabytes per call.
_COLS_POOL: dict = {}


def _cols_buffer(shape, dtype) -> np.ndarray:
    key = (shape, np.dtype(dtype).str)
    buf = _COLS_POOL.get(key)
    if buf is None:
        buf = np.empty(shape, dtype=dtype)
        _COLS_POOL[key] = buf
    return buf


def _im2col(xp: np.ndarray, kh: int, kw: int) -> np.ndarray:
    """(N, C, Hp, Wp) -> (C*kh*kw, N*Ho*Wo) patch matrix, tap-major rows."""
    n, c, hp, wp = xp.shape
    ho, wo = hp - kh + 1, wp - kw + 1
    cols = _cols_buffer((c, kh, kw, n, ho, wo), xp.dtype)
    xv = xp.transpose(1, 0, 2, 3)
    for i in range(kh):
        for j in range(kw):
            cols[:, i, j] = xv[:, :, i : i + ho, j : j + wo]
    return cols.reshape(c * kh * kw, n * ho * wo)


def conv2d(x: Tensor, w: Tensor, b: Tensor | None = None, pad=0) -> Tensor:
    """2D cross-correlation, stride 1, zero padding.

    x: (N, Cin, H, W); w: (Cout, Cin, kh, kw); b: (Cout,) or None.
    Output spatial dims are H + 2*ph - kh + 1 by W + 2*pw - kw + 1.
    """
    ph, pw = _pair(pad)
    if x.ndim != 4 or w.ndim != 4:
        raise ValueError(f"conv2d expects 4D x and w, got {x.shape} and {w.shape}")
    n, ci, h, wid = x.shape
    co, ci2, kh, kw = w.shape
    if ci != ci2:
        raise ValueError(f"channel mismatch: input has {ci}, kernel expects {ci2}")
    if h + 2 * ph < kh or wid + 2 * pw < kw:
        raise ValueError(
            f"kernel {kh}x{kw} larger than padded input {h + 2 * ph}x{wid + 2 * pw}"
        )
    if b is not None and b.shape != (co,):
        raise ValueError(f"bias shape {b.shape} != ({co},)")

    xp = _pad2d(x.data, ph, pw)
    ho, wo = h + 2 * ph - kh + 1, wid + 2 * pw - kw + 1
    cols = _im2col(xp, kh, kw)
    w2 = w.data.reshape(co, -1)
    y = cols.T @ w2.T  # (N*Ho*Wo, Cout)
    if b is not None:
        y += b.data
    out = np.ascontiguousarray(y.reshape(n, ho, wo, co).transpose(0, 3, 1, 2))

    def bwd(g):
        if b is not None and b.requires_grad:
            b._accum(g.sum(axis=(0, 2, 3)))
        if w.requires_grad:
            g2 = np.ascontiguousarray(g.transpose(1, 0, 2, 3)).reshape(co, -1)
            dw = (_im2col(xp, kh, kw) @ g2.T).T
            w._accum(dw.reshape(w.shape))
        if x.requires_grad:
            peh, pew = kh - 1 - ph, kw - 1 - pw
            gp = _pad2d(g, max(peh, 0), max(pew, 0))
            if peh < 0:
                gp = gp[:, :, -peh : gp.shape[2] + peh, :]
            if pew < 0:
                gp = gp[:, :, :, -pew : gp.shape[3] + pew]
            colsg = _im2col(np.ascontiguousarray(gp), kh, kw)
            wf = w.data[:, :, ::-1, ::-1].transpose(1, 0, 2, 3).reshape(ci, -1)
            dx = colsg.T @ wf.T  # (N*H*W, Cin)
            x._accum(np.ascontiguousarray(dx.reshape(n, h, wid, ci).transpose(0, 3, 1, 2)))

    parents = (x, w) if b is None else (x, w, b)
    return Tensor._make(out, parents, bwd)


def _zero_stuff(x: Tensor, s: int) -> Tensor:
    n, c, h, w = x.shape
    out = np.zeros((n, c, (h - 1) * s + 1, (w - 1) * s + 1), dtype=x.dtype)
    out[:, :, ::s, ::s] = x.data
    return Tensor._make(out, (x,), lambda g: x._accum(g[:, :, ::s, ::s]))


def _swap_flip(w: Tensor) -> Tensor:
    # (A, B, kh, kw) -> (B, A, kh, kw) with both spatial axes reversed.
    out = np.ascontiguousarray(w.data.transpose(1, 0, 2, 3)[:, :, ::-1, ::-1])
    return Tensor._make(
        out, (w,), lambda g: w._accum(g.transpose(1, 0, 2, 3)[:, :, ::-1, ::-1])
    )


def conv_transpose2d(x: Tensor, w: Tensor, b: Tensor | None = None, stride: int = 1, pad=0) -> Tensor:
    """Transposed convolution (gradient of conv2d wrt its input).

    x: (N, Cin, H, W); w: (Cin, Cout, kh, kw).  Output spatial dims are
    (H - 1) * stride + kh - 2 * pad; kernel 2r, stride r, pad r // 2 maps
    H to r*H exactly.
    """
    s = int(stride)
    ph, pw = _pair(pad)
    if s < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if x.ndim != 4 or w.ndim != 4:
        raise ValueError(f"conv_transpose2d expects 4D x and w, got {x.shape} and {w.shape}")
    ci, co, kh, kw = w.shape
    if x.shape[1] != ci:
        raise ValueError(f"channel mismatch: input has {x.shape[1]}, kernel expects {ci}")
    if ph > kh - 1 or pw > kw - 1:
        raise ValueError(f"pad ({ph}, {pw}) exceeds kernel-1 for kernel {kh}x{kw}")
    x2 = _zero_stuff(x, s) if s > 1 else x
    return conv2d(x2, _swap_flip(w), b=b, pad=(kh - 1 - ph, kw - 1 - pw))


def prelu(x: Tensor, a: Tensor) -> Tensor:
    """Per-channel PReLU on axis 1: y = x if x >= 0 else a[c] * x."""
    if x.ndim != 4:
        raise ValueError(f"prelu expects (N, C, H, W), got {x.shape}")
    if a.ndim != 1 or a.shape[0] != x.shape[1]:
        raise ValueError(f"slope shape {a.shape} does not match {x.shape[1]} channels")
    xd = x.data
    neg = xd < 0
    av = a.data.reshape(1, -1, 1, 1)
    out = np.where(neg, xd * av, xd)

    def bwd(g):
        if x.requires_grad:
            x._accum(np.where(neg, g * av, g))
        if a.requires_grad:
            a._accum((g * xd * neg).sum(axis=(0, 2, 3)))

    return Tensor._make(out, (x, a), bwd)


def softmax(x: Tensor, axis: int) -> Tensor:
    """Numerically stable softmax along one axis."""
    m = x.data.max(axis=axis, keepdims=True)
    e = np.exp(x.data - m)
    y = e / e.sum(axis=axis, keepdims=True)

    def bwd(g):
        dot = (g * y).sum(axis=axis, keepdims=True)
        x._accum(y * (g - dot))

    return Tensor._make(y, (x,), bwd)


def pixel_shuffle(x: Tensor, r: int) -> Tensor:
    """(N, C*r^2, H, W) -> (N, C, r*H, r*W).

    Channel block c*r*r + dx*r + dy lands at output channel c, sub-position
    (dx, dy).  Pure permutation; :func:`pixel_unshuffle` is the inverse.
    """
    n, cr2, h, w = x.shape
    if cr2 % (r * r):
        raise ValueError(f"channels {cr2} not divisible by r^2 = {r * r}")
    c = cr2 // (r * r)
    y = x.data.reshape(n, c, r, r, h, w).transpose(0, 1, 4, 2, 5, 3).reshape(n, c, h * r, w * r)

    def bwd(g):
        x._accum(
            g.reshape(n, c, h, r, w, r).transpose(0, 1, 3, 5, 2, 4).reshape(n, cr2, h, w)
        )

    return Tensor._make(y, (x,), bwd)


def pixel_unshuffle(x: Tensor, r: int) -> Tensor:
    """Inverse of :func:`pixel_shuffle`: (N, C, r*H, r*W) -> (N, C*r^2, H, W)."""
    n, c, hr, wr = x.shape
    if hr % r or wr % r:
        raise ValueError(f"spatial dims {hr}x{wr} not divisible by r = {r}")
    h, w = hr // r, wr // r
    y = x.data.reshape(n, c, h, r, w, r).transpose(0, 1, 3, 5, 2, 4).reshape(n, c * r * r, h, w)

    def bwd(g):
        x._accum(
            g.reshape(n, c, r, r, h, w).transpose(0, 1, 4, 2, 5, 3).reshape(n, c, hr, wr)
        )

    return Tensor._make(y, (x,), bwd)


def concat(xs, axis: int = 0) -> Tensor:
    """Concatenate tensors along an axis; backward splits the gradient."""
    xs = tuple(xs)
    if not xs:
        raise ValueError("concat of an empty sequence")
    nd = xs[0].ndim
    if not -nd <= axis < nd:
        raise ValueError(f"axis {axis} out of bounds for {nd}D tensors")
    axis %= nd
    ref = list(xs[0].shape)
    for t in xs[1:]:
        other = list(t.shape)
        if ref[:axis] + ref[axis + 1 :] != other[:axis] + other[axis + 1 :]:
            raise ValueError(f"off-axis shape mismatch: {xs[0].shape} vs {t.shape}")
    y = np.concatenate([t.data for t in xs], axis=axis)
    sizes = [t.shape[axis] for t in xs]
    offs = np.concatenate([[0], np.cumsum(sizes)])

    def bwd(g):
        sl = [slice(None)] * g.ndim
        for t, o0, o1 in zip(xs, offs[:-1], offs[1:]):
            if t.requires_grad:
                sl[axis] = slice(int(o0), int(o1))
                t._accum(g[tuple(sl)])

    return Tensor._make(y, xs, bwd)


def l1_loss(x: Tensor, y) -> Tensor:
    """Mean absolute error; the subgradient at zero is taken as 0."""
    yt = y if isinstance(y, Tensor) else Tensor(y)
    if x.shape != yt.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {yt.shape}")
    diff = x.data - yt.data
    val = np.asarray(np.abs(diff).mean(), dtype=x.dtype)

    def bwd(g):
        s = np.sign(diff) * (g / diff.size)
        if x.requires_grad:
            x._accum(s)
        if yt.requires_grad:
            yt._accum(-s)

    return Tensor._make(val, (x, yt), bwd)
