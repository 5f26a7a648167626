"""Weight initialization."""
from __future__ import annotations

import numpy as np

from .tensor import Tensor


def kaiming_init(shape, fan_mode: str = "fan_in", seed=None, rng=None, dtype=np.float32) -> Tensor:
    """Zero-mean normal draws with variance 2 / fan, as a trainable Tensor.

    For a conv weight (Cout, Cin, kh, kw), fan_in = Cin * kh * kw and
    fan_out = Cout * kh * kw.  ``rng`` takes precedence over ``seed``.
    """
    shape = tuple(int(s) for s in shape)
    if len(shape) < 2 or any(s < 1 for s in shape):
        raise ValueError(f"expected a weight shape with >= 2 positive dims, got {shape}")
    receptive = int(np.prod(shape[2:])) if len(shape) > 2 else 1
    if fan_mode == "fan_in":
        fan = shape[1] * receptive
    elif fan_mode == "fan_out":
        fan = shape[0] * receptive
    else:
        raise ValueError(f"fan_mode must be fan_in or fan_out, got {fan_mode!r}")
    if rng is None:
        rng = np.random.default_rng(seed)
    data = rng.normal(0.0, np.sqrt(2.0 / fan), size=shape).astype(dtype)
    return Tensor(data, requires_grad=True)
