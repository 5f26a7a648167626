"""Input coercion and validation helpers shared by the estimator and CLI."""
from __future__ import annotations

import numpy as np

from .core.lightfield import DimensionError, LightField4D


def as_lightfield(obj, name: str = "X") -> LightField4D:
    """Coerce a LightField4D, 4D, or 5D array into a LightField4D."""
    if isinstance(obj, LightField4D):
        return obj
    try:
        return LightField4D(np.asarray(obj))
    except (DimensionError, ValueError, TypeError) as e:
        raise DimensionError(f"{name}: not a light field ({e})") from e


def as_lightfield_list(X, name: str = "X"):
    """Coerce an estimator-style input into a list of LightField4D.

    Accepts a single light field, a 4D/5D array, or an iterable of either.
    """
    if isinstance(X, LightField4D):
        return [X]
    if isinstance(X, np.ndarray) and X.ndim in (4, 5):
        return [as_lightfield(X, name)]
    if isinstance(X, (list, tuple)):
        return [as_lightfield(item, f"{name}[{i}]") for i, item in enumerate(X)]
    raise DimensionError(
        f"{name}: expected a light field, a (U,V,X,Y[,C]) array, or a list of them"
    )


def check_min_angular(lf: LightField4D, n: int, name: str = "X") -> None:
    if lf.U < n or lf.V < n:
        raise DimensionError(
            f"{name}: angular resolution {lf.U}x{lf.V} below the required {n}x{n}"
        )


def check_min_spatial(lf: LightField4D, n: int, name: str = "X") -> None:
    if lf.X < n or lf.Y < n:
        raise DimensionError(
            f"{name}: spatial resolution {lf.X}x{lf.Y} below the required {n}x{n}"
        )
