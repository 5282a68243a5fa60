"""Small input-validation helpers used by the public API."""

from __future__ import annotations

import numpy as np


def as_vector(x, dim=None, name="x") -> np.ndarray:
    """Coerce ``x`` to a 1-D float64 array, optionally checking its length."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{name} has dimension {arr.shape[0]}, expected {dim}")
    return arr


def as_matrix(X, dim=None, name="X") -> np.ndarray:
    """Coerce ``X`` to a 2-D float64 array of points (one row per point)."""
    arr = np.asarray(X, dtype=float)
    if arr.size == 0:
        arr = arr.reshape(0, dim if dim is not None else 0)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array of points, got ndim={arr.ndim}")
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(f"{name} has dimension {arr.shape[1]}, expected {dim}")
    return arr


def check_positive(value, name="value") -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value
