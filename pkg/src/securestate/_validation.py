"""Input validation helpers shared by the public entry points."""

import numpy as np


class SensorIndexError(ValueError):
    """Raised when a sensor index set is out of range or not a subset."""


def check_matrix(M, name, shape=None):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {M.shape}")
    if shape is not None and M.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def check_vector(v, name, length=None):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-D array, got shape {v.shape}")
    if length is not None and v.shape[0] != length:
        raise ValueError(f"{name} must have length {length}, got {v.shape[0]}")
    return v


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or int(value) != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_index_set(index_set, p, within=None):
    """Return `index_set` as a sorted tuple of ints in ``range(p)``.

    If `within` is given the indices must also be members of it.
    """
    indices = sorted({int(i) for i in index_set})
    for i in indices:
        if not 0 <= i < p:
            raise SensorIndexError(f"sensor index {i} outside 0..{p - 1}")
    if within is not None:
        missing = set(indices) - set(within)
        if missing:
            raise SensorIndexError(
                f"sensor indices {sorted(missing)} not in index set {tuple(within)}"
            )
    return tuple(indices)


def check_noise_bounds(noise_bounds, p):
    if noise_bounds is None:
        return np.zeros(p)
    bounds = check_vector(noise_bounds, "noise_bounds", p)
    if np.any(bounds < 0):
        raise ValueError("noise bounds must be non-negative")
    return bounds


def check_epsilon(epsilon):
    epsilon = float(epsilon)
    if not epsilon >= 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    return epsilon


def max_attack_cap(p):
    """Largest number of attacked sensors under which recovery is possible."""
    return (p + 1) // 2 - 1
