from .tensor import Tensor, no_grad
from .functional import (
    concat,
    conv2d,
    conv_transpose2d,
    l1_loss,
    pixel_shuffle,
    pixel_unshuffle,
    prelu,
    softmax,
)
from .init import kaiming_init
from .optim import Adam, MissingGradError, ParamStore
from .gradcheck import grad_check

__all__ = [
    "Adam",
    "MissingGradError",
    "ParamStore",
    "Tensor",
    "concat",
    "conv2d",
    "conv_transpose2d",
    "grad_check",
    "kaiming_init",
    "l1_loss",
    "no_grad",
    "pixel_shuffle",
    "pixel_unshuffle",
    "prelu",
    "softmax",
]
