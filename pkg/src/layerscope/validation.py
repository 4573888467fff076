"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError, ValidationError


def as_float_vector(x, name: str, min_len: int = 0) -> np.ndarray:
    """Coerce to a finite 1-D float64 array of at least ``min_len`` entries."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_len:
        raise ValidationError(f"{name} needs at least {min_len} entries, got {arr.shape[0]}")
    check_finite(arr, name)
    return arr


def as_float_matrix(x, name: str) -> np.ndarray:
    """Coerce to a finite 2-D float64 array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {arr.shape}")
    check_finite(arr, name)
    return arr


def check_finite(arr: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains NaN or infinite values")


def check_positive(value, name: str):
    if not value > 0:
        raise ValidationError(f"{name} must be positive, got {value!r}")
    return value


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value <= 0:
        raise ValidationError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_index(value, limit: int, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    if not 0 <= value < limit:
        raise ValidationError(f"{name} out of range: {value} not in [0, {limit})")
    return int(value)
