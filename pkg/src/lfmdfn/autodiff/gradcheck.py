"""Finite-difference verification of reverse-mode gradients."""
from __future__ import annotations

import numpy as np

from .tensor import Tensor, no_grad


def grad_check(f, x: Tensor, eps: float = 1e-3, indices=None, atol_scale: float = 1e-3) -> float:
    """Max relative error between reverse-mode and central-difference grads.

    ``f`` maps the tensor to a scalar Tensor and must be re-runnable.  The
    relative error per entry is |a - fd| / max(|a|, |fd|, atol_scale), so
    entries with grads below ``atol_scale`` are compared quasi-absolutely.
    ``indices`` optionally restricts probing to a set of flat indices.
    Double-precision inputs are strongly recommended.
    """
    if not x.data.flags.writeable or not x.data.flags.c_contiguous:
        x.data = np.ascontiguousarray(x.data)
    x.requires_grad = True
    x.zero_grad()
    out = f(x)
    if out.size != 1:
        raise ValueError("grad_check requires a scalar-valued function")
    out.backward()
    if x.grad is None:
        raise ValueError("f does not depend on x (no gradient reached it)")
    analytic = np.asarray(x.grad, dtype=np.float64).reshape(-1)

    flat = x.data.reshape(-1)
    idxs = range(flat.size) if indices is None else indices
    worst = 0.0
    with no_grad():
        for i in idxs:
            old = flat[i]
            flat[i] = old + eps
            f1 = float(f(x).data)
            flat[i] = old - eps
            f0 = float(f(x).data)
            flat[i] = old
            fd = (f1 - f0) / (2.0 * eps)
            a = float(analytic[i])
            err = abs(a - fd) / max(abs(a), abs(fd), atol_scale)
            worst = max(worst, err)
    return worst
