"""Dual renormalization via nested root-finding.

The dual map increases each kept entry by an implicit additive amount:
entry i becomes the root y in [x_i, 1] of phi''(y) * (y - x_i) = nu, with the
outer multiplier nu chosen so the lifted entries sum to one.  Dual validity
(power entropies with alpha > 1) makes each inner residual nondecreasing on
the bracket and the outer sum strictly increasing in nu on (0, M] with
M = phi''(1) * (1 - max_i x_i), so both layers are plain monotone bisections
nested as in the decoding pseudocode.  The inner tolerance is kept a factor
ten tighter than the outer one so inner error cannot flip outer comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import generators as gens
from .errors import BracketError, GeneratorError
from .renorm_primal import (
    DEFAULT_TOL,
    RenormResult,
    _identity_rows,
    _prepare_rows,
    _scatter_rows,
)
from .rootfind import Bracket, bisect_monotone
from .validation import check_sub_prob_vector

# phi''(1) = 1 for every power entropy, so the admissible nu bound for an
# entry x is simply 1 - x
_D2_AT_ONE = 1.0

_TINY = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class DualInnerProblem:
    """One coordinate update: lift ``x`` to the y solving
    phi''(y) * (y - x) = nu.  The residual is nondecreasing in y on [x, 1]
    for any dual-valid generator."""

    x: float
    nu: float


def _inner_residual(gen: gens.GeneratorSpec, x, y, nu):
    """phi''(y) * (y - x) - nu, with the y -> x limit -nu.

    Guarding y <= x by comparison keeps phi''(0) * 0 from producing NaN when
    the bracket starts at x = 0.
    """
    diff = y - x
    safe_y = np.maximum(y, _TINY)
    val = gens._d2_kernel(gen, safe_y) * diff - nu
    return np.where(diff > 0.0, val, -nu)


def _require_dual(gen: gens.GeneratorSpec) -> None:
    if not gen.is_dual_valid:
        raise GeneratorError(
            f"{gen} is not dual-valid (power entropies with alpha > 1 only)"
        )


def dual_inner_solve(
    gen: gens.GeneratorSpec, problem: DualInnerProblem, tol: float = 1e-13
) -> float:
    """Solve one coordinate update on [x, 1]; strictly increasing in nu."""
    _require_dual(gen)
    x = float(problem.x)
    nu = float(problem.nu)
    if not 0.0 <= x <= 1.0:
        raise BracketError(f"x must lie in [0, 1], got {x!r}")
    bound = _D2_AT_ONE * (1.0 - x)
    if not 0.0 < nu <= bound:
        raise BracketError(f"nu must lie in (0, {bound!r}], got {nu!r}")
    return float(
        bisect_monotone(
            lambda y: _inner_residual(gen, x, y, nu),
            Bracket(x, 1.0, tol),
            refine=True,
        )
    )


def dual_batch(
    gen: gens.GeneratorSpec,
    X,
    lengths,
    tol: float = DEFAULT_TOL,
    inner_tol: float | None = None,
):
    """Nested bisection over a padded (n, K) batch of kept-entry rows."""
    _require_dual(gen)
    if inner_tol is None:
        inner_tol = 0.1 * tol
    Xs, mask, order, sums = _prepare_rows(X, lengths)
    Ts, nu, work = _identity_rows(Xs, mask, sums)
    if not np.any(work):
        return _scatter_rows(Ts, order, mask), nu

    idx = np.flatnonzero(work)
    lengths = np.asarray(lengths, dtype=np.intp)

    act = mask[idx]
    Xw = np.where(act, Xs[idx], 1.0)
    counts = act.sum(axis=1)
    flat_x = Xw[act]
    offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
    flat_bound = _D2_AT_ONE * (1.0 - flat_x)
    xmax = Xs[idx, lengths[idx] - 1]
    M = _D2_AT_ONE * (1.0 - xmax)

    # the outer search runs over c = lifted value of a zero entry, i.e.
    # nu(c) = c phi''(c) = c**(alpha-1); c sweeps [0, M**(1/(alpha-1))]
    # while nu sweeps (0, M] monotonically, and the bracket stays
    # absolutely conditioned for every alpha
    inv_exp = 1.0 / (gen.alpha - 1.0)

    def multiplier(c_rows):
        return gens._fast_pow(c_rows, gen.alpha - 1.0)

    def lifted(c_rows):
        nu_flat = np.repeat(multiplier(c_rows), counts)
        # nu(c) <= M never exceeds a per-entry bound; the minimum only
        # absorbs float rounding at the endpoint, where the bound entry
        # then lifts exactly to 1
        nu_eff = np.minimum(nu_flat, flat_bound)
        return bisect_monotone(
            lambda y: _inner_residual(gen, flat_x, y, nu_eff),
            Bracket(flat_x, 1.0, inner_tol),
            refine=True,
        )

    def residual(c_rows):
        return np.add.reduceat(lifted(c_rows), offsets) - 1.0

    # inflate past the M**(1/(alpha-1)) round trip so nu(c_hi) provably
    # reaches M; the per-entry minimum absorbs the overshoot
    pad = 1.0 + 64.0 * np.finfo(np.float64).eps * max(1.0, inv_exp)
    c_hi = gens._fast_pow(M, inv_exp) * pad
    roots = bisect_monotone(
        residual, Bracket(np.zeros_like(c_hi), c_hi, tol), refine=True
    )
    vals = lifted(roots)
    Tw = np.zeros_like(Xw)
    Tw[act] = vals
    Ts[idx] = Tw
    nu[idx] = multiplier(roots)
    return _scatter_rows(Ts, order, mask), nu


def renorm_dual(gen: gens.GeneratorSpec, x, tol: float = DEFAULT_TOL) -> RenormResult:
    """Dual renormalization of one sub-probability vector.

    On-simplex inputs return unchanged with nu = 0; otherwise nu lies in
    (0, M] and every output entry strictly exceeds its input entry.
    """
    arr = check_sub_prob_vector(x)
    T, nu = dual_batch(gen, arr[None, :], np.array([arr.size]), tol=tol)
    return RenormResult(T[0], float(nu[0]))
