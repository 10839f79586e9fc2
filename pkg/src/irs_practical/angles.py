"""Phase-angle helpers shared across modules."""

import numpy as np

TWO_PI = 2 * np.pi


def wrap_phase(theta):
    """Map angles onto the half-open interval [-pi, pi).

    Scalars come back as ``float``; arrays keep their shape.
    """
    arr = np.asarray(theta, dtype=float)
    wrapped = np.mod(arr + np.pi, TWO_PI) - np.pi
    # rounding in the subtraction can land exactly on +pi
    wrapped = np.where(wrapped >= np.pi, -np.pi, wrapped)
    # values already in range pass through untouched (the shift by pi
    # would otherwise flush tiny angles to zero)
    wrapped = np.where((arr >= -np.pi) & (arr < np.pi), arr, wrapped)
    if wrapped.ndim == 0:
        return float(wrapped)
    return wrapped
