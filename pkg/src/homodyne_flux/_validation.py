"""Input checks shared by the simulators, estimators and CLI."""
from __future__ import annotations

import math

import numpy as np


def check_probability(value, name, *, open_low=False):
    value = float(value)
    low_ok = value > 0 if open_low else value >= 0
    if not (low_ok and value <= 1) or math.isnan(value):
        bound = "(0, 1]" if open_low else "[0, 1]"
        raise ValueError(f"{name} must lie in {bound}, got {value}")
    return value


def check_positive(value, name):
    value = float(value)
    if not value > 0 or math.isinf(value):
        raise ValueError(f"{name} must be positive and finite, got {value}")
    return value


def check_non_negative(value, name):
    value = float(value)
    if not value >= 0 or math.isinf(value):
        raise ValueError(f"{name} must be non-negative and finite, got {value}")
    return value


def check_samples(samples, *, min_samples=2, name="samples"):
    """Return ``samples`` as a finite 1-D float array with at least ``min_samples``."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size < min_samples:
        raise ValueError(f"{name} needs at least {min_samples} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def floor_count(total, step):
    """``floor(total / step)`` that tolerates binary round-off (300 / 1e-5 -> 3e7)."""
    ratio = total / step
    return int(math.floor(ratio + 1e-9 * max(1.0, ratio)))
