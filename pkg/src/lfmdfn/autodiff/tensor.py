"""Reverse-mode automatic differentiation on numpy arrays.

A Tensor wraps an ndarray plus an optional gradient and a closure that
propagates an upstream gradient to its parents.  ``backward`` runs the
closures in reverse topological order.  Gradient accumulation is
non-mutating (``grad = grad + g``), so closures may hand out views of
their own gradient without aliasing hazards.

Only what the network needs is implemented: elementwise add/sub/mul (same
shape or scalar), reshape, transpose, and reductions.  Structured ops
(convolutions, shuffles, losses) live in :mod:`lfmdfn.autodiff.functional`.
"""
from __future__ import annotations

import contextlib

import numpy as np

_GRAD_ENABLED = True


@contextlib.contextmanager
def no_grad():
    """Disable graph construction inside the block."""
    global _GRAD_ENABLED
    prev = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


def grad_enabled() -> bool:
    return _GRAD_ENABLED


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        if isinstance(data, Tensor):
            data = data.data
        self.data = np.asarray(data)
        if not np.issubdtype(self.data.dtype, np.floating):
            self.data = self.data.astype(np.float32)
        self.grad = None
        self.requires_grad = bool(requires_grad) and _GRAD_ENABLED
        self._parents = ()
        self._backward = None

    # -- graph construction -------------------------------------------------

    @staticmethod
    def _make(data, parents, backward):
        out = Tensor(data)
        if _GRAD_ENABLED and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        return out

    def _accum(self, g):
        # Non-mutating: never writes into an existing grad buffer.  Constant
        # leaves are skipped so they never grow .grad arrays.
        if not self.requires_grad:
            return
        self.grad = g if self.grad is None else self.grad + g

    # -- properties ----------------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self):
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"

    # -- backward ------------------------------------------------------------

    def backward(self, grad=None) -> None:
        """Accumulate gradients of this tensor's parents.

        ``grad`` seeds the output gradient; it defaults to 1 and is only
        optional for scalar tensors.
        """
        if grad is None:
            if self.data.size != 1:
                raise ValueError("backward() without a seed requires a scalar tensor")
            grad = np.ones_like(self.data)
        else:
            grad = np.array(grad, dtype=self.data.dtype, copy=True)
            if grad.shape != self.data.shape:
                raise ValueError(f"seed shape {grad.shape} != tensor shape {self.data.shape}")
        if not self.requires_grad:
            raise RuntimeError("backward() on a tensor that does not require grad")

        # Iterative topological order over the subgraph that requires grad.
        topo = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad and id(p) not in visited:
                    stack.append((p, False))

        self._accum(grad)
        for node in reversed(topo):
            if node._backward is not None:
                node._backward(node.grad)

    # -- elementwise arithmetic (same shape or python scalar) -----------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, Tensor):
            return other
        if np.isscalar(other):
            return None  # handled as a constant
        raise TypeError(f"unsupported operand type {type(other)!r}")

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return Tensor._make(self.data + other, (self,), lambda g: self._accum(g))
        if o.shape != self.shape:
            raise ValueError(f"add requires matching shapes, got {self.shape} and {o.shape}")

        def bwd(g):
            self._accum(g)
            o._accum(g)

        return Tensor._make(self.data + o.data, (self, o), bwd)

    __radd__ = __add__

    def __neg__(self):
        return Tensor._make(-self.data, (self,), lambda g: self._accum(-g))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return Tensor._make(self.data - other, (self,), lambda g: self._accum(g))
        if o.shape != self.shape:
            raise ValueError(f"sub requires matching shapes, got {self.shape} and {o.shape}")

        def bwd(g):
            self._accum(g)
            o._accum(-g)

        return Tensor._make(self.data - o.data, (self, o), bwd)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return Tensor._make(self.data * other, (self,), lambda g: self._accum(g * other))
        if o.shape != self.shape:
            raise ValueError(f"mul requires matching shapes, got {self.shape} and {o.shape}")

        def bwd(g):
            self._accum(g * o.data)
            o._accum(g * self.data)

        return Tensor._make(self.data * o.data, (self, o), bwd)

    __rmul__ = __mul__

    # -- shape manipulation ----------------------------------------------------

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        src = self.data.shape
        return Tensor._make(
            self.data.reshape(shape), (self,), lambda g: self._accum(g.reshape(src))
        )

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        inv = np.argsort(axes)
        return Tensor._make(
            self.data.transpose(axes), (self,), lambda g: self._accum(g.transpose(inv))
        )

    # -- reductions -------------------------------------------------------------

    def sum(self):
        return Tensor._make(
            np.asarray(self.data.sum()),
            (self,),
            lambda g: self._accum(np.broadcast_to(g, self.data.shape)),
        )

    def mean(self):
        n = self.data.size
        return Tensor._make(
            np.asarray(self.data.mean()),
            (self,),
            lambda g: self._accum(np.broadcast_to(g / n, self.data.shape)),
        )
