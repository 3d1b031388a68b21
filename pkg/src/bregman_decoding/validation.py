"""Input validation helpers.

Probability vectors tolerate float-serialization noise: a total mass within
1e-6 of unity is accepted and renormalized by sum-division on ingestion;
anything worse is rejected.  Sub-probability vectors (the k kept entries of a
truncated distribution) must carry mass in (0, 1 + 1e-9].
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

PROB_SUM_TOL = 1e-6
SUB_PROB_SUM_TOL = 1e-9
# below this distance from unit mass, renormalization is the identity
ON_SIMPLEX_TOL = 1e-12


def as_float_vector(x, name: str = "input") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < 1:
        raise InputError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def check_sub_prob_vector(x) -> np.ndarray:
    """Validate k kept entries: each in [0, 1], mass in (0, 1 + 1e-9].

    Mass marginally above 1 (float noise) is scaled back onto the simplex.
    Returns a fresh float64 copy.
    """
    arr = as_float_vector(x, "sub-probability vector").copy()
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise InputError("entries must lie in [0, 1]")
    total = float(np.sum(np.sort(arr)))
    if total > 1.0 + SUB_PROB_SUM_TOL:
        raise InputError(f"entries sum to {total!r} > 1 + {SUB_PROB_SUM_TOL:g}")
    if total <= 0.0:
        raise InputError("at least one entry must be positive")
    if total > 1.0:
        arr /= total
    return arr


def check_prob_vector(p) -> np.ndarray:
    """Validate a dense distribution and renormalize it to exact unit sum."""
    arr = as_float_vector(p, "probability vector").copy()
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise InputError("probabilities must lie in [0, 1]")
    total = float(np.sum(np.sort(arr)))
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise InputError(
            f"probabilities sum to {total!r}, outside 1 +/- {PROB_SUM_TOL:g}"
        )
    if total != 1.0:
        arr /= total
    return arr


def check_prob_matrix(P) -> np.ndarray:
    """Validate a batch of distributions, one per row, renormalizing rows."""
    arr = np.asarray(P, dtype=np.float64)
    if arr.ndim != 2:
        raise InputError(f"expected a 2-d batch, got shape {arr.shape}")
    if arr.shape[1] < 1:
        raise InputError("rows must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise InputError("batch contains non-finite values")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise InputError("probabilities must lie in [0, 1]")
    totals = arr.sum(axis=1)
    if np.any(np.abs(totals - 1.0) > PROB_SUM_TOL):
        bad = int(np.argmax(np.abs(totals - 1.0)))
        raise InputError(
            f"row {bad} sums to {totals[bad]!r}, outside 1 +/- {PROB_SUM_TOL:g}"
        )
    return arr / totals[:, None]
