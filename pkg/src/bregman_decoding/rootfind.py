"""Bisection on monotone scalar maps over a bracket.

This is the shared root-finding engine behind both renormalizers.  The
residual functions it receives are nondecreasing, so plain bisection is
exact and branch-free; it also vectorizes cleanly, which the renormalizers
exploit by passing array-valued brackets (one independent root per element).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, ConvergenceError


@dataclass(frozen=True)
class Bracket:
    """Search interval(s) with an absolute tolerance on the root location.

    ``lo`` and ``hi`` may be scalars or broadcastable arrays; ``max_iter``
    defaults to ceil(log2(width / tol_x)) + 2, which always suffices.
    """

    lo: object
    hi: object
    tol_x: float = 1e-12
    max_iter: int | None = None

    def __post_init__(self):
        if self.tol_x <= 0.0:
            raise ValueError("tol_x must be positive")


def _iterations_needed(width: float, tol_x: float) -> int:
    # stop once the bracket is narrower than 2*tol_x: the midpoint is then
    # within tol_x of every point of the bracket, the root included
    if width <= 2.0 * tol_x:
        return 0
    return math.ceil(math.log2(width / (2.0 * tol_x)))


def default_max_iter(width: float, tol_x: float) -> int:
    if width <= tol_x:
        return 2
    return math.ceil(math.log2(width / tol_x)) + 2


def bisect_monotone(fn, bracket: Bracket, refine: bool = False):
    """Locate the root of a nondecreasing function on ``bracket``.

    Requires fn(lo) <= 0 <= fn(hi).  Returns a point within ``tol_x`` of the
    root (or of the crossing point when fn jumps).  With ``refine=True`` the
    returned point is the secant interpolation inside the terminal bracket,
    which stays within ``tol_x`` of the plain-bisection midpoint but carries
    a far smaller residual.

    ``fn`` must evaluate elementwise when the bracket is array-valued; each
    element is then an independent root-finding problem and all of them are
    advanced in lockstep.
    """
    lo = np.asarray(bracket.lo, dtype=np.float64)
    hi = np.asarray(bracket.hi, dtype=np.float64)
    scalar = lo.ndim == 0 and hi.ndim == 0
    lo, hi = np.broadcast_arrays(lo, hi)
    lo, hi = lo.copy(), hi.copy()
    if np.any(hi < lo):
        raise BracketError("bracket has hi < lo")

    flo = np.asarray(fn(lo), dtype=np.float64)
    fhi = np.asarray(fn(hi), dtype=np.float64)
    if np.any(flo > 0.0) or np.any(fhi < 0.0):
        raise BracketError("sign condition fn(lo) <= 0 <= fn(hi) violated")

    width = float(np.max(hi - lo)) if lo.size else 0.0
    needed = _iterations_needed(width, bracket.tol_x)
    budget = bracket.max_iter
    if budget is None:
        budget = default_max_iter(width, bracket.tol_x)
    if needed > budget:
        raise ConvergenceError(
            f"{needed} iterations needed to reach tol_x={bracket.tol_x:g}, "
            f"but max_iter={budget}"
        )

    for _ in range(needed):
        mid = 0.5 * (lo + hi)
        fmid = np.asarray(fn(mid), dtype=np.float64)
        neg = fmid < 0.0
        lo = np.where(neg, mid, lo)
        flo = np.where(neg, fmid, flo)
        hi = np.where(neg, hi, mid)
        fhi = np.where(neg, fhi, fmid)

    if refine:
        # a few bracketed secant steps inside the terminal bracket: they
        # cannot leave the tol_x ball but shrink the residual superlinearly,
        # which matters when the root is far smaller than the bracket
        root = 0.5 * (lo + hi)
        for _ in range(3):
            span = fhi - flo
            with np.errstate(divide="ignore", invalid="ignore"):
                cand = lo - flo * (hi - lo) / span
            root = np.clip(np.where(span > 0.0, cand, root), lo, hi)
            fr = np.asarray(fn(root), dtype=np.float64)
            neg = fr < 0.0
            lo = np.where(neg, root, lo)
            flo = np.where(neg, fr, flo)
            hi = np.where(neg, hi, root)
            fhi = np.where(neg, fhi, fr)
    else:
        root = 0.5 * (lo + hi)
    return float(root) if scalar else root
