"""Brute-force reference implementations for the test suite.

These deliberately avoid the closed forms and the logarithmic search: every
support is enumerated, every k is scanned, and the outer multiplier is found
by a dense grid instead of bisection.  Renormalization for a fixed support
goes through the generic root-finding paths only, so agreement between these
oracles and the fast decoder is meaningful test content.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from . import generators as gens
from .decoder import DecodeConfig, cost_at_k
from .errors import GeneratorError, MultipleCrossingsError, SizeError
from .renorm_dual import _inner_residual, dual_batch
from .renorm_primal import primal_generic_batch
from .rootfind import Bracket, bisect_monotone
from .validation import check_prob_vector, check_sub_prob_vector

_BRUTE_FORCE_MAX = 12


def _renorm_generic(cfg: DecodeConfig, X, lengths):
    """Generic-path renormalization only; no closed-form dispatch."""
    if cfg.mode == "primal":
        return primal_generic_batch(cfg.generator, X, lengths, tol=cfg.tol)
    return dual_batch(cfg.generator, X, lengths, tol=cfg.tol, inner_tol=cfg.inner_tol)


def support_costs(p, k: int, cfg: DecodeConfig):
    """Cost of every size-k support of p, in combinations(range(V), k) order.

    Returns (supports, costs).  All supports are renormalized in one batch,
    but each is an independent projection; nothing is shared with the
    decoder's top-k shortcut.
    """
    arr = check_prob_vector(p)
    V = arr.size
    if V > _BRUTE_FORCE_MAX:
        raise SizeError(f"brute force is guarded to V <= {_BRUTE_FORCE_MAX}")
    if not 1 <= k <= V:
        raise SizeError(f"k must lie in [1, {V}]")
    supports = np.array(list(combinations(range(V), k)), dtype=np.intp)
    kept = arr[supports]
    lengths = np.full(supports.shape[0], k, dtype=np.intp)
    T, _ = _renorm_generic(cfg, kept, lengths)
    gen = cfg.generator
    if cfg.mode == "primal":
        head = gens._div_kernel(gen, T, kept).sum(axis=1)
        tail_all = float(gens._tail_div_primal(gen, arr).sum())
        tail_kept = gens._tail_div_primal(gen, kept).sum(axis=1)
    else:
        head = gens._div_kernel(gen, kept, T).sum(axis=1)
        tail_all = float(gens._tail_div_dual(gen, arr).sum())
        tail_kept = gens._tail_div_dual(gen, kept).sum(axis=1)
    costs = head + (tail_all - tail_kept) + cfg.lam * k
    return supports, costs


def brute_force_best_support(p, k: int, cfg: DecodeConfig):
    """Exhaustive minimum over all size-k supports: (support tuple, cost)."""
    supports, costs = support_costs(p, k, cfg)
    best = int(np.argmin(costs))
    return tuple(int(i) for i in supports[best]), float(costs[best])


def support_costs_many(P, k: int, cfg: DecodeConfig):
    """support_costs for a whole batch of distributions at once.

    Returns (supports (C, k), costs (n, C)); one renormalization batch covers
    every (distribution, support) pair, which keeps exhaustive sweeps over
    hundreds of random vectors affordable.
    """
    from .validation import check_prob_matrix

    A = check_prob_matrix(P)
    n, V = A.shape
    if V > _BRUTE_FORCE_MAX:
        raise SizeError(f"brute force is guarded to V <= {_BRUTE_FORCE_MAX}")
    if not 1 <= k <= V:
        raise SizeError(f"k must lie in [1, {V}]")
    supports = np.array(list(combinations(range(V), k)), dtype=np.intp)
    C = supports.shape[0]
    kept = A[:, supports].reshape(n * C, k)
    lengths = np.full(n * C, k, dtype=np.intp)
    T, _ = _renorm_generic(cfg, kept, lengths)
    gen = cfg.generator
    if cfg.mode == "primal":
        head = gens._div_kernel(gen, T, kept).sum(axis=1)
        tail_all = gens._tail_div_primal(gen, A).sum(axis=1)
        tail_kept = gens._tail_div_primal(gen, kept).sum(axis=1)
    else:
        head = gens._div_kernel(gen, kept, T).sum(axis=1)
        tail_all = gens._tail_div_dual(gen, A).sum(axis=1)
        tail_kept = gens._tail_div_dual(gen, kept).sum(axis=1)
    costs = (head - tail_kept).reshape(n, C) + tail_all[:, None] + cfg.lam * k
    return supports, costs


def linear_scan_k_star(p, cfg: DecodeConfig):
    """Evaluate cost_at_k for every k up to the cap; smallest argmin wins."""
    arr = check_prob_vector(p)
    best_k, best_cost = 1, None
    for k in range(1, cfg.k_cap(arr.size) + 1):
        cost, _ = cost_at_k(arr, k, cfg)
        if best_cost is None or cost < best_cost:
            best_k, best_cost = k, cost
    return best_k, best_cost


def _count_sign_changes(values: np.ndarray) -> int:
    signs = np.sign(values)
    signs = signs[signs != 0]
    if signs.size < 2:
        return 0
    return int(np.sum(signs[1:] != signs[:-1]))


def nu_grid_scan(gen: gens.GeneratorSpec, x, mode: str, step: float) -> float:
    """Dense scan of the sum-to-one residual over the admissible nu range.

    Returns the midpoint of the grid cell where the residual changes sign
    and raises if more than one sign change shows up (that would falsify
    uniqueness of the multiplier).
    """
    arr = check_sub_prob_vector(x)
    if step <= 0.0:
        raise ValueError("step must be positive")
    if mode == "primal":
        fx = gens._f_kernel(gen, arr)
        f1 = gens._f_at_one(gen)
        active = arr > 0.0 if gen.singular_at_zero else np.ones_like(arr, dtype=bool)
        hi = f1 - np.max(fx[active])
        grid = np.arange(0.0, hi + step, step)
        shifted = fx[active][None, :] + grid[:, None]
        resid = gens._f_inv_kernel(gen, shifted).sum(axis=1) - 1.0
    elif mode == "dual":
        if not gen.is_dual_valid:
            raise GeneratorError(f"{gen} is not dual-valid")
        hi = 1.0 - float(arr.max())
        grid = np.arange(step, hi + step, step)
        grid = np.minimum(grid, hi)
        flat_x = np.tile(arr, grid.size)
        nu_flat = np.minimum(np.repeat(grid, arr.size), 1.0 - flat_x)
        xi = bisect_monotone(
            lambda y: _inner_residual(gen, flat_x, y, nu_flat),
            Bracket(flat_x, 1.0, 1e-13),
            refine=True,
        )
        resid = xi.reshape(grid.size, arr.size).sum(axis=1) - 1.0
    else:
        raise ValueError(f"mode must be 'primal' or 'dual', got {mode!r}")

    crossings = _count_sign_changes(resid)
    if crossings > 1:
        raise MultipleCrossingsError(
            f"{crossings} sign changes found; the multiplier should be unique"
        )
    if np.any(resid == 0.0):
        return float(grid[int(np.argmax(resid == 0.0))])
    flips = np.flatnonzero((resid[:-1] < 0.0) & (resid[1:] >= 0.0))
    if flips.size == 0:
        # residual never crosses: root sits at an endpoint of the range
        return float(grid[-1] if resid[-1] < 0.0 else grid[0])
    j = int(flips[0])
    return float(0.5 * (grid[j] + grid[j + 1]))
