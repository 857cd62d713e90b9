"""Input validation helpers, in the spirit of ``sklearn.utils.validation``."""

from fractions import Fraction
import numbers

import numpy as np

from .exceptions import DimensionMismatch, NotPositive


def check_vector(v, n=None, name="v"):
    """Return ``v`` as a finite 1-d float array, optionally of length ``n``."""
    coords = getattr(v, "coords", v)
    arr = np.asarray(coords, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatch(f"{name} has length {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_square(A, n=None, name="matrix"):
    arr = np.asarray(A, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatch(f"{name} has size {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_nonnegative(A, tol=0.0, name="matrix"):
    """Raise :class:`NotPositive` if ``A`` has an entry below ``-tol``."""
    arr = np.asarray(A, dtype=float)
    if arr.size and arr.min() < -tol:
        raise NotPositive(f"{name} has a negative entry {arr.min():.3g}")
    return arr


def check_rows(X, n, name="X"):
    """Coerce a single vector or a stack of row vectors to a 2-d array."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != n:
        raise DimensionMismatch(f"{name} must have {n} columns, got shape {arr.shape}")
    return arr


def as_fraction(t):
    """Exact rational from an int, Fraction or a ``"k/m"`` string."""
    if isinstance(t, Fraction):
        return t
    if isinstance(t, numbers.Integral):
        return Fraction(int(t))
    if isinstance(t, str):
        return Fraction(t.strip())
    if isinstance(t, float):
        raise TypeError("floats are not accepted as exact rationals; pass a Fraction or 'k/m'")
    raise TypeError(f"cannot interpret {t!r} as a rational number")


def check_cell_map(cell_map, n):
    """Validate a total map on ``range(n)``, returned as a tuple of ints."""
    m = tuple(int(i) for i in cell_map)
    if len(m) != n:
        raise DimensionMismatch(f"cell map has length {len(m)}, expected {n}")
    if any(i < 0 or i >= n for i in m):
        raise ValueError("cell map must send atoms into range(n)")
    return m
