"""Primal renormalization: project k kept entries back onto the simplex.

Every map here sends a sub-probability vector (entries in [0, 1], mass at
most 1) to the simplex by shifting entries in the generator's derivative
domain: entry i becomes dphi_inv(dphi(x_i) + nu) with the scalar nu chosen so
the outputs sum to one.  Four parameter values admit closed forms (division
by the sum, a shift of the square roots, a uniform additive shift, and
water-filling) and two limit kinds exist only in closed form; everything else
goes through monotone bisection on nu.

All maps are permutation-equivariant *exactly*: inputs are sorted internally,
so reductions see the same operand order no matter how the caller permuted
the entries.  The batch entry points take a padded (n, K) matrix plus row
lengths and solve all rows in lockstep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import generators as gens
from .errors import GeneratorError, TieError
from .rootfind import Bracket, bisect_monotone
from .validation import ON_SIMPLEX_TOL, check_sub_prob_vector

# dispatch windows around the closed-form parameter values
CLOSED_FORM_TOL = 1e-12

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class RenormResult:
    """Renormalized entries (input order) and the shift that achieved them.

    ``nu`` is the additive shift in the derivative domain for functional
    generators, the water level for the alpha -> +inf limit, and the mass
    deficit handed to the argmax for the alpha -> -inf limit.
    """

    probs: np.ndarray
    nu: float


# ---------------------------------------------------------------------------
# shared row plumbing
# ---------------------------------------------------------------------------


def _prepare_rows(X, lengths):
    """Sort each row ascending (pads last) and report masses.

    Returns (Xs, mask, order, sums): ``Xs`` has NaN pads, ``order`` maps
    sorted slots back to caller positions, ``sums`` is exact under input
    permutation because the addends are visited in sorted order.
    """
    X = np.asarray(X, dtype=np.float64)
    n, K = X.shape
    lengths = np.asarray(lengths, dtype=np.intp)
    mask = np.arange(K)[None, :] < lengths[:, None]
    Xw = np.where(mask, X, np.nan)
    order = np.argsort(Xw, axis=1, kind="stable")
    Xs = np.take_along_axis(Xw, order, axis=1)
    sums = np.where(mask, Xs, 0.0).sum(axis=1)
    return Xs, mask, order, sums


def _scatter_rows(Ts, order, mask):
    """Undo the internal sort; padded slots come back as zeros."""
    out = np.zeros_like(Ts)
    np.put_along_axis(out, order, np.where(mask, Ts, 0.0), axis=1)
    return out


def _identity_rows(Xs, mask, sums):
    """Rows already on the simplex map to themselves with nu = 0."""
    Ts = np.where(mask, Xs, 0.0)
    nu = np.zeros(Xs.shape[0])
    return Ts, nu, sums < 1.0 - ON_SIMPLEX_TOL


def _single_result(batch_fn, gen, x, **kw) -> RenormResult:
    arr = check_sub_prob_vector(x)
    if gen is None:
        T, nu = batch_fn(arr[None, :], np.array([arr.size]), **kw)
    else:
        T, nu = batch_fn(gen, arr[None, :], np.array([arr.size]), **kw)
    return RenormResult(T[0], float(nu[0]))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def sum_division_batch(X, lengths):
    """alpha = 1 (Shannon): divide by the total mass."""
    Xs, mask, order, sums = _prepare_rows(X, lengths)
    Ts, nu, work = _identity_rows(Xs, mask, sums)
    if np.any(work):
        s = sums[work]
        Ts[work] = Xs[work] / s[:, None]
        # consistent with dphi(x) = log(x) + 1: shifting by log(1/s)
        nu[work] = -np.log(s)
    return _scatter_rows(Ts, order, mask), nu


def additive_shift_batch(X, lengths):
    """alpha = 2: spread the deficit uniformly over the kept entries."""
    Xs, mask, order, sums = _prepare_rows(X, lengths)
    Ts, nu, work = _identity_rows(Xs, mask, sums)
    if np.any(work):
        shift = (1.0 - sums[work]) / lengths[work]
        Ts[work] = Xs[work] + shift[:, None]
        nu[work] = shift
    return _scatter_rows(Ts, order, mask), nu


def sqrt_shift_batch(X, lengths):
    """alpha = 1.5: shift the square roots by a common amount and square."""
    Xs, mask, order, sums = _prepare_rows(X, lengths)
    Ts, nu, work = _identity_rows(Xs, mask, sums)
    if np.any(work):
        Xw = Xs[work]
        mw = mask[work]
        k = lengths[work].astype(np.float64)
        roots = np.where(mw, np.sqrt(Xw), 0.0)
        r = roots.sum(axis=1)
        s = sums[work]
        shift = (np.sqrt(r * r + k * (1.0 - s)) - r) / k
        Ts[work] = (roots + shift[:, None]) ** 2
        # dphi(x) = 2*sqrt(x), so the derivative-domain shift is twice this
        nu[work] = 2.0 * shift
    return _scatter_rows(Ts, order, mask), nu


def water_filling_batch(X, lengths):
    """alpha -> +inf: raise every entry below a common level.

    The level is found exactly by one pass over the sorted entries; nu is
    the water level itself.
    """
    Xs, mask, order, sums = _prepare_rows(X, lengths)
    Ts, nu, work = _identity_rows(Xs, mask, sums)
    if np.any(work):
        Xw = np.where(mask[work], Xs[work], np.inf)
        k = lengths[work]
        n, K = Xw.shape
        counts = np.arange(1, K + 1, dtype=np.float64)[None, :]
        prefix = np.cumsum(np.where(mask[work], Xs[work], 0.0), axis=1)
        # raising the m smallest entries to level c keeps the rest, so
        # c = (1 - (total - prefix_m)) / m; valid when it sits between the
        # m-th and (m+1)-th smallest entries
        levels = (1.0 - sums[work][:, None] + prefix) / counts
        upper = np.concatenate([Xw[:, 1:], np.full((n, 1), np.inf)], axis=1)
        valid = (levels >= Xw) & (levels <= upper) & mask[work]
        m = np.argmax(valid, axis=1)
        rows = np.arange(n)
        level = levels[rows, m]
        Ts[work] = np.maximum(np.where(mask[work], Xs[work], 0.0), level[:, None])
        nu[work] = level
    return _scatter_rows(Ts, order, mask), nu


def argmax_deficit_batch(X, lengths):
    """alpha -> -inf: hand the whole deficit to the unique largest entry.

    Ties for the maximum are rejected (the limit formula presumes a unique
    argmax); rows already on the simplex pass through untouched since no
    mass is placed at all.
    """
    Xs, mask, order, sums = _prepare_rows(X, lengths)
    Ts, nu, work = _identity_rows(Xs, mask, sums)
    if np.any(work):
        idx = np.flatnonzero(work)
        top = lengths[idx] - 1
        largest = Xs[idx, top]
        tied = (lengths[idx] > 1) & (Xs[idx, top - 1] == largest)
        if np.any(tied):
            raise TieError("maximum entry is not unique")
        deficit = 1.0 - sums[idx]
        Ts[idx, top] = largest + deficit
        nu[idx] = deficit
    return _scatter_rows(Ts, order, mask), nu


# ---------------------------------------------------------------------------
# generic root-finding path
# ---------------------------------------------------------------------------


def _require_generic_primal(gen: gens.GeneratorSpec) -> None:
    if gen.is_limit:
        raise GeneratorError(f"{gen} is served by a closed form, not root-finding")
    if not gen.is_primal_valid:
        raise GeneratorError(f"{gen} is not primal-valid")
    if gen.kind == gens.KIND_ALPHA and gen.alpha < 0.0:
        raise GeneratorError(
            "alpha < 0 gives phi(0) = +inf, so sparse decoding degenerates; "
            "negative alpha is not supported on the primal path"
        )


def primal_generic_batch(gen: gens.GeneratorSpec, X, lengths, tol: float = DEFAULT_TOL):
    """Solve sum_i dphi_inv(dphi(x_i) + nu) = 1 rowwise by bisection.

    The search runs over t = lifted value of the largest entry, which sweeps
    t in [max_i x_i, 1] while nu = dphi(t) - dphi(max_i x_i) sweeps the
    bracket [0, dphi(1) - dphi(max_i x_i)] monotonically.  The change of
    variable keeps the bracket absolutely conditioned for every alpha (the
    multiplier itself collapses to zero exponentially fast as alpha grows).
    At the left end the lifted sum is the row mass (at most 1); at t = 1 the
    largest entry contributes 1 by construction.  Entries equal to zero stay
    zero for generators whose derivative diverges at zero and are lifted
    otherwise.
    """
    _require_generic_primal(gen)
    Xs, mask, order, sums = _prepare_rows(X, lengths)
    Ts, nu, work = _identity_rows(Xs, mask, sums)
    if not np.any(work):
        return _scatter_rows(Ts, order, mask), nu

    idx = np.flatnonzero(work)
    Xw = np.where(mask[idx], Xs[idx], 1.0)
    act = mask[idx]
    if gen.singular_at_zero:
        act = act & (Xw > 0.0)

    lengths = np.asarray(lengths, dtype=np.intp)
    counts = act.sum(axis=1)
    flat_f = gens._f_kernel(gen, Xw)[act]
    offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])

    if gen.kind == gens.KIND_ALPHA and gen.alpha > 1.0:
        # parametrize by c = lifted value of a zero entry (nu = dphi(c)),
        # sweeping c in [0, 1]; at c = 1 every shifted entry clamps to 1
        def lifted(c_rows):
            nu_rows = gens._f_kernel(gen, c_rows)
            return gens._f_inv_kernel(gen, flat_f + np.repeat(nu_rows, counts))

        def residual(c_rows):
            return np.add.reduceat(lifted(c_rows), offsets) - 1.0

        zeros = np.zeros(idx.size)
        roots = bisect_monotone(
            residual, Bracket(zeros, np.ones_like(zeros), tol), refine=True
        )
        nu_root = gens._f_kernel(gen, roots)
    else:
        # dphi(0) = -inf here, so zero lifts are pinned at zero and the
        # natural parameter is t = lifted value of the largest entry,
        # sweeping nu = dphi(t) - dphi(max x) over its bracket monotonically
        top = lengths[idx] - 1
        xmax = Xs[idx, top]
        fmax = gens._f_kernel(gen, xmax)
        flat_tied = (Xw == xmax[:, None])[act]

        def lifted(t_rows):
            nu_rows = gens._f_kernel(gen, t_rows) - fmax
            vals = gens._f_inv_kernel(gen, flat_f + np.repeat(nu_rows, counts))
            # entries tied with the maximum lift to t exactly: pins the
            # endpoint signs and keeps equal inputs giving equal outputs
            return np.where(flat_tied, np.repeat(t_rows, counts), vals)

        def residual(t_rows):
            return np.add.reduceat(lifted(t_rows), offsets) - 1.0

        roots = bisect_monotone(
            residual, Bracket(xmax, np.ones_like(xmax), tol), refine=True
        )
        nu_root = gens._f_kernel(gen, roots) - fmax

    vals = lifted(roots)
    Tw = np.zeros_like(Xw)
    Tw[act] = vals
    Ts[idx] = Tw
    nu[idx] = nu_root
    return _scatter_rows(Ts, order, mask), nu


# ---------------------------------------------------------------------------
# single-vector surface
# ---------------------------------------------------------------------------


def renorm_sum_division(x) -> RenormResult:
    """Divide the kept entries by their sum (the alpha = 1 map)."""
    return _single_result(sum_division_batch, None, x)


def renorm_sqrt_shift(x) -> RenormResult:
    """Closed form for alpha = 1.5: square the uniformly shifted roots."""
    return _single_result(sqrt_shift_batch, None, x)


def renorm_additive_shift(x) -> RenormResult:
    """Closed form for alpha = 2: add the deficit equally to every entry."""
    return _single_result(additive_shift_batch, None, x)


def renorm_water_filling(x) -> RenormResult:
    """Closed form for alpha -> +inf: raise entries to a common water level."""
    return _single_result(water_filling_batch, None, x)


def renorm_argmax_deficit(x) -> RenormResult:
    """Closed form for alpha -> -inf: all deficit mass onto the unique argmax."""
    return _single_result(argmax_deficit_batch, None, x)


def renorm_primal_generic(gen: gens.GeneratorSpec, x, tol: float = DEFAULT_TOL) -> RenormResult:
    """Primal map via root-finding, for any supported functional generator."""
    return _single_result(primal_generic_batch, gen, x, tol=tol)


def primal_batch(gen: gens.GeneratorSpec, X, lengths, tol: float = DEFAULT_TOL):
    """Batch dispatcher: closed forms where available, else root-finding."""
    if gen.kind == gens.KIND_SHANNON:
        return sum_division_batch(X, lengths)
    if gen.kind == gens.KIND_LIMIT_POS:
        return water_filling_batch(X, lengths)
    if gen.kind == gens.KIND_LIMIT_NEG:
        return argmax_deficit_batch(X, lengths)
    if abs(gen.alpha - 1.5) < CLOSED_FORM_TOL:
        return sqrt_shift_batch(X, lengths)
    if abs(gen.alpha - 2.0) < CLOSED_FORM_TOL:
        return additive_shift_batch(X, lengths)
    return primal_generic_batch(gen, X, lengths, tol=tol)


def renorm_primal(gen: gens.GeneratorSpec, x, tol: float = DEFAULT_TOL) -> RenormResult:
    """Renormalize one sub-probability vector with the primal map of ``gen``."""
    return _single_result(primal_batch, gen, x, tol=tol)
