"""Input validation helpers shared by the distribution and fitting code."""

from __future__ import annotations

import numbers

import numpy as np


class InsufficientDataError(ValueError):
    """Fewer observations than a model needs."""


def check_positive(value, name):
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


def check_finite(value, name):
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return float(value)


def check_probability(u):
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0.0) & (u < 1.0))):
        raise ValueError("probabilities must lie in the open interval (0, 1)")
    return u


def check_sample_size(n):
    if not isinstance(n, numbers.Integral) or n < 1:
        raise ValueError(f"sample size must be a positive integer, got {n!r}")
    return int(n)


def check_sample(data, min_size=1):
    """Return ``data`` as a finite 1-D float array."""
    x = np.asarray(data, dtype=float)
    if x.ndim == 2 and x.shape[1] == 1:
        x = x[:, 0]
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D sample, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    if x.size < min_size:
        raise InsufficientDataError(
            f"need at least {min_size} observations, got {x.size}")
    return x
