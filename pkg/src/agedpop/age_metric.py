"""Metric on the age half-line.

Ages live on [0, inf).  The metric used throughout the package is

    r(a, b) = min(|a - b|, omega(a) + omega(b)),   omega(a) = min(a, 1/a),

which is bounded by 2, makes the half-line totally bounded (large ages are
close to age zero: r(10**k, 0) = 10**-k), and still separates points.  All
functions are vectorized over numpy arrays.
"""

from __future__ import annotations

import numpy as np

__all__ = ["omega", "age_distance"]


def omega(alpha):
    """min(alpha, 1/alpha), with omega(0) = 0.

    This is the distance from `alpha` to age zero; it peaks at 1 for
    alpha = 1 and decays toward both ends of the half-line.
    """
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0):
        raise ValueError("ages must be nonnegative")
    out = np.empty_like(alpha)
    small = alpha <= 1.0
    out[small] = alpha[small]
    # alpha > 1 here, reciprocal is safe
    out[~small] = 1.0 / alpha[~small]
    return out if out.ndim else float(out)


def age_distance(alpha, beta):
    """Bounded metric r on [0, inf); symmetric, vanishes only on the diagonal.

    Broadcasts over array arguments.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(alpha < 0) or np.any(beta < 0):
        raise ValueError("ages must be nonnegative")
    direct = np.abs(alpha - beta)
    through_zero = omega(alpha) + omega(beta)
    out = np.minimum(direct, through_zero)
    return out if out.ndim else float(out)
