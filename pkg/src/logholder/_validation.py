"""Input validation helpers shared by the public functions and estimators."""
import math

import numpy as np

from .exceptions import InvalidInput


def check_finite_scalar(x, name="value"):
    try:
        x = float(x)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name} must be a real number, got {x!r}") from exc
    if not math.isfinite(x):
        raise InvalidInput(f"{name} must be finite, got {x!r}")
    return x


def check_values(values, name="values"):
    """Return ``values`` as a 1-d finite float array with at least one entry."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InvalidInput(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInput(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} must be finite")
    return arr


def check_energies(E, name="E"):
    """Return energies as a finite float array (scalars become 0-d arrays)."""
    arr = np.asarray(E, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} must be finite")
    return arr


def check_positive_int(n, name):
    if isinstance(n, bool) or int(n) != n or int(n) < 1:
        raise InvalidInput(f"{name} must be a positive integer, got {n!r}")
    return int(n)
