"""The network: fusion blocks, filter branch, residual branch, assembly.

Features live in (U, V, ch, X, Y) tensors.  Each fusion block folds the
feature field into up to four plane batches (sub-aperture, micro-lens, and
the two EPI foldings), runs one padded 2D conv + PReLU per plane, unfolds,
and concatenates along the channel axis.  The filter branch and residual
branch both operate per sub-aperture view with 1x1 convs.
"""
from __future__ import annotations

import numpy as np

from ..autodiff.functional import concat, conv2d, conv_transpose2d, pixel_shuffle, prelu, softmax
from ..autodiff.init import kaiming_init
from ..autodiff.optim import ParamStore
from ..autodiff.tensor import Tensor, no_grad
from ..core.lightfield import DimensionError, LightField4D
from .config import MDFNConfig
from .dynfilter import apply_dynamic_filters

# Feature tensor (U, V, ch, X, Y) -> (b0, b1, ch, h, w) axis order per branch.
_PLANE_PERM = {
    "sai": (0, 1, 2, 3, 4),
    "mlens": (3, 4, 2, 0, 1),
    "epih": (0, 3, 2, 1, 4),
    "epiv": (1, 4, 2, 0, 3),
}


def _fold(t: Tensor, branch: str):
    perm = _PLANE_PERM[branch]
    tt = t if perm == (0, 1, 2, 3, 4) else t.transpose(perm)
    s = tt.shape
    return tt.reshape(s[0] * s[1], s[2], s[3], s[4]), s


def _unfold(b: Tensor, branch: str, s5) -> Tensor:
    t = b.reshape(s5[0], s5[1], b.shape[1], s5[3], s5[4])
    perm = _PLANE_PERM[branch]
    inv = tuple(int(i) for i in np.argsort(perm))
    return t if inv == (0, 1, 2, 3, 4) else t.transpose(inv)


# -- parameters ---------------------------------------------------------------


def _layer_specs(cfg: MDFNConfig):
    """Yield (name, kind, shape) for every parameter, in checkpoint order."""
    branches = cfg.branches()
    out_c = cfg.c // len(branches)
    k = cfg.branch_kernel
    for i in range(cfg.n):
        cin = 1 if i == 0 else cfg.c
        for name in branches:
            yield f"block{i}.{name}.w", "weight", (out_c, cin, k, k)
            yield f"block{i}.{name}.b", "bias", (out_c,)
            yield f"block{i}.{name}.a", "prelu", (out_c,)
    r = cfg.r
    if cfg.upsampler == "dynamic_filter":
        yield "dfb.conv1.w", "weight", (r * r * cfg.dfb_mid_channels, cfg.c, 1, 1)
        yield "dfb.conv1.b", "bias", (r * r * cfg.dfb_mid_channels,)
        yield "dfb.conv2.w", "weight", (cfg.d * cfg.d, cfg.dfb_mid_channels, 1, 1)
        yield "dfb.conv2.b", "bias", (cfg.d * cfg.d,)
    else:
        yield "deconv.w", "weight", (cfg.c, 1, 2 * r, 2 * r)
        yield "deconv.b", "bias", (1,)
    yield "rb.conv1.w", "weight", (cfg.rb_mid_channels, cfg.c, 1, 1)
    yield "rb.conv1.b", "bias", (cfg.rb_mid_channels,)
    yield "rb.conv1.a", "prelu", (cfg.rb_mid_channels,)
    yield "rb.conv2.w", "weight", (cfg.r * cfg.r, cfg.rb_mid_channels, 1, 1)
    yield "rb.conv2.b", "bias", (cfg.r * cfg.r,)


def build_params(cfg: MDFNConfig, dtype=np.float32) -> ParamStore:
    """Fresh parameters: Kaiming weights, zero biases, 0.25 PReLU slopes."""
    cfg.validate()
    rng = np.random.default_rng([cfg.seed, 0])
    params = ParamStore()
    for name, kind, shape in _layer_specs(cfg):
        if kind == "weight":
            params.add(name, kaiming_init(shape, rng=rng, dtype=dtype))
        elif kind == "bias":
            params.add(name, Tensor(np.zeros(shape, dtype=dtype), requires_grad=True))
        else:
            params.add(name, Tensor(np.full(shape, 0.25, dtype=dtype), requires_grad=True))
    return params


def parameter_report(cfg: MDFNConfig):
    """Per-layer (name, shape, count) rows in parameter order."""
    return [(name, shape, int(np.prod(shape))) for name, _, shape in _layer_specs(cfg)]


def count_parameters(cfg: MDFNConfig) -> int:
    return sum(count for _, _, count in parameter_report(cfg))


# -- forward passes ------------------------------------------------------------


def _as_feature_input(i_lr) -> Tensor:
    if isinstance(i_lr, LightField4D):
        if i_lr.C != 1:
            raise DimensionError(f"model input must be single-channel, got C={i_lr.C}")
        i_lr = Tensor(i_lr.data[..., 0])
    elif not isinstance(i_lr, Tensor):
        i_lr = Tensor(np.asarray(i_lr))
    if i_lr.ndim != 4:
        raise DimensionError(f"model input must be (U, V, X, Y), got shape {i_lr.shape}")
    return i_lr


def mdfb_forward(f: Tensor, params: ParamStore, cfg: MDFNConfig, block_index: int) -> Tensor:
    """One fusion block: per-plane conv + PReLU, concat to c channels."""
    pad = (cfg.branch_kernel - 1) // 2
    outs = []
    for name in cfg.branches():
        folded, s5 = _fold(f, name)
        pre = f"block{block_index}.{name}"
        y = prelu(conv2d(folded, params[pre + ".w"], params[pre + ".b"], pad=pad), params[pre + ".a"])
        outs.append(_unfold(y, name, s5))
    return concat(outs, axis=2)


def mdfn_features(i_lr, params: ParamStore, cfg: MDFNConfig) -> Tensor:
    """Compose the n fusion blocks: (U, V, X, Y) -> (U, V, c, X, Y)."""
    x = _as_feature_input(i_lr)
    nu, nv, nx, ny = x.shape
    if min(nx, ny) < cfg.branch_kernel:
        raise DimensionError(
            f"spatial dims {nx}x{ny} smaller than branch kernel {cfg.branch_kernel}"
        )
    f = x.reshape(nu, nv, 1, nx, ny)
    for i in range(cfg.n):
        f = mdfb_forward(f, params, cfg, i)
    return f


def dfb_forward(f: Tensor, params: ParamStore, cfg: MDFNConfig) -> Tensor:
    """Filter branch: features -> normalized (U, V, rX, rY, d, d) field."""
    folded, s5 = _fold(f, "sai")
    h = conv2d(folded, params["dfb.conv1.w"], params["dfb.conv1.b"])
    h = pixel_shuffle(h, cfg.r)
    h = conv2d(h, params["dfb.conv2.w"], params["dfb.conv2.b"])
    h = softmax(h, axis=1)
    nu, nv = s5[0], s5[1]
    rx, ry = h.shape[2], h.shape[3]
    return (
        h.reshape(nu, nv, cfg.d * cfg.d, rx, ry)
        .transpose(0, 1, 3, 4, 2)
        .reshape(nu, nv, rx, ry, cfg.d, cfg.d)
    )


def rb_forward(f: Tensor, params: ParamStore, cfg: MDFNConfig) -> Tensor:
    """Residual branch: features -> (U, V, rX, rY) detail field."""
    folded, s5 = _fold(f, "sai")
    h = prelu(conv2d(folded, params["rb.conv1.w"], params["rb.conv1.b"]), params["rb.conv1.a"])
    h = conv2d(h, params["rb.conv2.w"], params["rb.conv2.b"])
    h = pixel_shuffle(h, cfg.r)
    return h.reshape(s5[0], s5[1], h.shape[2], h.shape[3])


def _deconv_upsample(f: Tensor, params: ParamStore, cfg: MDFNConfig) -> Tensor:
    folded, s5 = _fold(f, "sai")
    h = conv_transpose2d(
        folded, params["deconv.w"], params["deconv.b"], stride=cfg.r, pad=cfg.r // 2
    )
    return h.reshape(s5[0], s5[1], h.shape[2], h.shape[3])


def forward(i_lr, params: ParamStore, cfg: MDFNConfig) -> Tensor:
    """Super-resolve a Y-channel field: (U, V, X, Y) -> (U, V, rX, rY)."""
    x = _as_feature_input(i_lr)
    f = mdfn_features(x, params, cfg)
    if cfg.upsampler == "dynamic_filter":
        up = apply_dynamic_filters(dfb_forward(f, params, cfg), x)
    else:
        up = _deconv_upsample(f, params, cfg)
    return up + rb_forward(f, params, cfg)


def super_resolve(lf: LightField4D, params: ParamStore, cfg: MDFNConfig) -> LightField4D:
    """Inference wrapper: single-channel LightField4D in and out, no graph."""
    with no_grad():
        out = forward(lf, params, cfg)
    return LightField4D(out.data[..., None])
