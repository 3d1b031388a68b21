"""Adaptive sparse decoding of probability vectors.

Decoding keeps the k* largest entries of a distribution and renormalizes
them, where k* minimizes

    cost(k) = divergence(renormalized top-k padded with zeros, p) + lam * k.

The divergence places the estimate in the first argument in primal mode and
in the second in dual mode.  cost is discretely convex in k, so a k with
nonpositive backward difference and nonnegative forward difference is a
global minimizer; binary search finds it in O(log V) cost evaluations and
exponential search in O(log k*).  Cost evaluation shares one descending sort
of p per decode, prefix sums for the tail terms, and closed-form head terms
for the closed-form generator parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import generators as gens
from .errors import GeneratorError, InputError, RangeError
from .renorm_primal import (
    CLOSED_FORM_TOL,
    DEFAULT_TOL,
    RenormResult,
    primal_batch,
    renorm_primal,
)
from .renorm_dual import dual_batch, renorm_dual
from .validation import check_prob_matrix, check_prob_vector

_SEARCHES = ("binary", "exponential", "linear")

# rows * max-width budget for one batched renormalization during curve scans
_CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class DecodeConfig:
    """Decoding mode, generator, sparsity cost, and search knobs.

    ``lam`` is the cost per kept token; ``k_max`` caps the search range
    (None means unbounded); ``tol`` is the outer root-finding tolerance
    (inner dual solves run ten times tighter); ``temperature`` only applies
    when ingesting logits.
    """

    generator: gens.GeneratorSpec = gens.shannon()
    mode: str = "primal"
    lam: float = 0.0
    k_max: int | None = None
    search: str = "binary"
    tol: float = DEFAULT_TOL
    temperature: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "generator", gens.generator_from_alpha(self.generator))
        if self.mode not in ("primal", "dual"):
            raise InputError(f"mode must be 'primal' or 'dual', got {self.mode!r}")
        if not (np.isfinite(self.lam) and self.lam >= 0.0):
            raise InputError("lam must be finite and nonnegative")
        if self.k_max is not None and int(self.k_max) < 1:
            raise InputError("k_max must be a positive integer or None")
        if self.search not in _SEARCHES:
            raise InputError(f"search must be one of {_SEARCHES}")
        if not self.tol > 0.0:
            raise InputError("tol must be positive")
        if not (np.isfinite(self.temperature) and self.temperature > 0.0):
            raise InputError("temperature must be positive and finite")
        gen = self.generator
        if self.mode == "dual":
            if not gen.is_dual_valid:
                raise GeneratorError(
                    f"dual decoding requires alpha > 1, got {gen}"
                )
        else:
            if gen.is_limit:
                raise GeneratorError(
                    f"{gen} supports only fixed-k renormalization, not adaptive "
                    "decoding (its divergence has no pointwise form)"
                )
            if gen.kind == gens.KIND_ALPHA and gen.alpha < 0.0:
                raise GeneratorError(
                    "alpha < 0 makes every strict truncation infinitely costly; "
                    "primal decoding supports Shannon and alpha > 0"
                )

    def k_cap(self, size: int) -> int:
        return size if self.k_max is None else min(int(self.k_max), size)

    @property
    def inner_tol(self) -> float:
        return 0.1 * self.tol


@dataclass(frozen=True)
class DecodeResult:
    """Optimal sparsity, its support, and the renormalized distribution.

    ``support`` holds ascending original indices; ``support_probs`` aligns
    with it and sums to one.  ``k_cap`` records the cap the search ran
    under, so callers can detect saturation (k_star == k_cap < size).
    ``cost_curve`` lists the (k, cost) pairs actually evaluated when the
    caller asked for them.
    """

    k_star: int
    support: np.ndarray
    support_probs: np.ndarray
    nu: float
    cost: float
    size: int
    k_cap: int
    cost_curve: tuple | None = None

    @cached_property
    def sparse_probs(self) -> np.ndarray:
        """Full-length distribution, zero off the support."""
        out = np.zeros(self.size)
        out[self.support] = self.support_probs
        return out


def select_top_k(p, k: int):
    """The k largest entries in descending order with their original indices.

    Ties break deterministically toward lower original indices.  Uses
    partial selection, so the cost is O(V + k log k).
    """
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise InputError("expected a non-empty 1-d vector")
    V = arr.size
    if not 1 <= int(k) <= V:
        raise RangeError(f"k must lie in [1, {V}], got {k}")
    k = int(k)
    if k == V:
        chosen = np.arange(V)
    else:
        part = np.argpartition(arr, V - k)[V - k:]
        boundary = arr[part].min()
        above = np.flatnonzero(arr > boundary)
        ties = np.flatnonzero(arr == boundary)[: k - above.size]
        chosen = np.concatenate([above, ties])
    # descending value, ascending index on ties
    order = np.lexsort((chosen, -arr[chosen]))
    idx = chosen[order]
    return arr[idx], idx


def logits_to_probs(logits, temperature: float = 1.0) -> np.ndarray:
    """Temperature-scaled softmax with max-subtraction stabilization."""
    arr = np.asarray(logits, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise InputError("expected a non-empty 1-d logits vector")
    if not np.all(np.isfinite(arr)):
        raise InputError("logits must be finite")
    if not (np.isfinite(temperature) and temperature > 0.0):
        raise InputError("temperature must be positive and finite")
    z = arr / temperature
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


# ---------------------------------------------------------------------------
# cost curve machinery
# ---------------------------------------------------------------------------


class _CurveEvaluator:
    """cost(k) over one descending-sorted distribution, with caching.

    Head terms (divergence over the kept entries) come from closed forms for
    the closed-form primal generators and from batched renormalization
    otherwise; tail terms are suffix sums precomputed in O(V).
    """

    def __init__(self, w, cfg: DecodeConfig, cum_w=None, cum_tail=None, cum_sqrt=None):
        self.w = w
        self.cfg = cfg
        gen = cfg.generator
        if cum_w is None:
            cum_w = np.cumsum(w)
        self.cum_w = cum_w
        if cum_tail is None:
            if cfg.mode == "primal":
                terms = gens._tail_div_primal(gen, w)
            else:
                terms = gens._tail_div_dual(gen, w)
            cum_tail = np.cumsum(terms)
        self.cum_tail = cum_tail
        self.total_tail = float(cum_tail[-1])

        self.closed = None
        if cfg.mode == "primal":
            if gen.kind == gens.KIND_SHANNON:
                self.closed = "shannon"
            elif abs(gen.alpha - 1.5) < CLOSED_FORM_TOL:
                self.closed = "sqrt"
                if cum_sqrt is None:
                    cum_sqrt = np.cumsum(np.sqrt(w))
                self.cum_sqrt = cum_sqrt
            elif abs(gen.alpha - 2.0) < CLOSED_FORM_TOL:
                self.closed = "shift"
        self._cache: dict[int, float] = {}

    # -- head terms --------------------------------------------------------

    def _closed_heads(self, ks: np.ndarray) -> np.ndarray:
        s = self.cum_w[ks - 1]
        k = ks.astype(np.float64)
        if self.closed == "shannon":
            return s - 1.0 - np.log(s)
        if self.closed == "shift":
            d = 1.0 - s
            return d * d / (2.0 * k)
        r = self.cum_sqrt[ks - 1]
        c = (np.sqrt(r * r + k * (1.0 - s)) - r) / k
        return 2.0 * c * c * r + (4.0 / 3.0) * k * c * c * c

    def _generic_heads(self, ks: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        gen = cfg.generator
        out = np.empty(ks.size)
        pos = 0
        while pos < ks.size:
            end = pos + 1
            width = int(ks[pos])
            while end < ks.size:
                grown = max(width, int(ks[end]))
                if grown * (end + 1 - pos) > _CHUNK_ELEMENTS:
                    break
                width = grown
                end += 1
            chunk = ks[pos:end]
            cols = np.arange(width)[None, :]
            mask = cols < chunk[:, None]
            X = np.where(mask, self.w[None, :width], 0.0)
            if cfg.mode == "primal":
                T, _ = primal_batch(gen, X, chunk, tol=cfg.tol)
                div = gens._div_kernel(gen, T, X)
            else:
                T, _ = dual_batch(
                    gen, X, chunk, tol=cfg.tol, inner_tol=cfg.inner_tol
                )
                div = gens._div_kernel(gen, X, T)
            out[pos:end] = np.where(mask, div, 0.0).sum(axis=1)
            pos = end
        return out

    def _costs_uncached(self, ks: np.ndarray) -> np.ndarray:
        heads = self._closed_heads(ks) if self.closed else self._generic_heads(ks)
        tails = self.total_tail - self.cum_tail[ks - 1]
        return heads + tails + self.cfg.lam * ks

    # -- public ------------------------------------------------------------

    def cost(self, k: int) -> float:
        c = self._cache.get(k)
        if c is None:
            c = float(self._costs_uncached(np.array([k]))[0])
            self._cache[k] = c
        return c

    def costs(self, ks: np.ndarray) -> np.ndarray:
        vals = self._costs_uncached(ks)
        self._cache.update(zip(ks.tolist(), vals.tolist()))
        return vals

    def renorm_at(self, k: int):
        """Renormalize the top-k prefix; returns (probs descending, nu)."""
        x = self.w[:k]
        cfg = self.cfg
        if cfg.mode == "primal":
            T, nu = primal_batch(cfg.generator, x[None, :], np.array([k]), tol=cfg.tol)
        else:
            T, nu = dual_batch(
                cfg.generator, x[None, :], np.array([k]),
                tol=cfg.tol, inner_tol=cfg.inner_tol,
            )
        return T[0], float(nu[0])

    def evaluated(self) -> tuple:
        return tuple(sorted(self._cache.items()))


def _binary_search(ev: _CurveEvaluator, cap: int) -> int:
    """Discrete binary search for the leftmost k with nonnegative forward
    difference; correct because cost is discretely convex in k."""
    if cap == 1:
        return 1
    if ev.cost(2) - ev.cost(1) >= 0.0:
        return 1
    if ev.cost(cap) - ev.cost(cap - 1) <= 0.0:
        return cap
    lo, hi = 1, cap
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ev.cost(mid + 1) - ev.cost(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi


def _exponential_search(ev: _CurveEvaluator, cap: int) -> int:
    """Double a probe until it provably bounds k*, then bisect below it.

    Uses O(log k*) cost evaluations and never renormalizes more than
    O(k*) entries per step.
    """
    def settled(u: int) -> bool:
        # true upper bound test: forward difference at u is nonnegative
        return u >= cap or ev.cost(u + 1) - ev.cost(u) >= 0.0

    if settled(1):
        return 1
    lo, hi = 1, 2
    while not settled(hi):
        lo, hi = hi, min(2 * hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if settled(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _linear_search(ev: _CurveEvaluator, cap: int) -> int:
    costs = ev.costs(np.arange(1, cap + 1))
    return int(np.argmin(costs)) + 1


_STRATEGIES = {
    "binary": _binary_search,
    "exponential": _exponential_search,
    "linear": _linear_search,
}


# ---------------------------------------------------------------------------
# public decoding surface
# ---------------------------------------------------------------------------


def _evaluator(p, cfg: DecodeConfig):
    arr = check_prob_vector(p)
    w = np.sort(arr)[::-1].copy()
    return arr, _CurveEvaluator(w, cfg)


def cost_at_k(p, k: int, cfg: DecodeConfig):
    """Regularized cost of keeping the top-k entries, plus the renormalized
    kept entries (descending order)."""
    arr, ev = _evaluator(p, cfg)
    if not 1 <= int(k) <= arr.size:
        raise RangeError(f"k must lie in [1, {arr.size}], got {k}")
    k = int(k)
    probs, nu = ev.renorm_at(k)
    return ev.cost(k), RenormResult(probs, nu)


def find_k_star(p, cfg: DecodeConfig) -> int:
    """The smallest minimizer of cost(k) on [1, min(k_max, V)]."""
    arr, ev = _evaluator(p, cfg)
    return _STRATEGIES[cfg.search](ev, cfg.k_cap(arr.size))


def cost_curve(p, cfg: DecodeConfig, ks=None) -> list:
    """Evaluate cost(k) over ``ks`` (default: every k up to the cap)."""
    arr, ev = _evaluator(p, cfg)
    if ks is None:
        ks = np.arange(1, cfg.k_cap(arr.size) + 1)
    else:
        ks = np.asarray(ks, dtype=np.intp)
        if ks.size and (ks.min() < 1 or ks.max() > arr.size):
            raise RangeError(f"k values must lie in [1, {arr.size}]")
    vals = ev.costs(ks)
    return list(zip(ks.tolist(), vals.tolist()))


def cost_curve_batch(P, cfg: DecodeConfig, ks=None) -> np.ndarray:
    """cost(k) for every row of ``P`` and every k in ``ks``; shape (n, nk).

    All rows share one batched renormalization per chunk, which makes
    property sweeps over many random vectors tractable.
    """
    A = check_prob_matrix(P)
    n, V = A.shape
    if ks is None:
        ks = np.arange(1, cfg.k_cap(V) + 1)
    ks = np.asarray(ks, dtype=np.intp)
    if ks.size and (ks.min() < 1 or ks.max() > V):
        raise RangeError(f"k values must lie in [1, {V}]")
    W = np.sort(A, axis=1)[:, ::-1]
    gen = cfg.generator
    if cfg.mode == "primal":
        tails = gens._tail_div_primal(gen, W)
    else:
        tails = gens._tail_div_dual(gen, W)
    cum_tail = np.cumsum(tails, axis=1)

    out = np.empty((n, ks.size))
    width = int(ks.max())
    p_rows = max(1, _CHUNK_ELEMENTS // (max(width, 1) * ks.size))
    for start in range(0, n, p_rows):
        stop = min(n, start + p_rows)
        block = W[start:stop, :width]
        m = stop - start
        X = np.repeat(block, ks.size, axis=0)
        lengths = np.tile(ks, m)
        mask = np.arange(width)[None, :] < lengths[:, None]
        X = np.where(mask, X, 0.0)
        if cfg.mode == "primal":
            T, _ = primal_batch(gen, X, lengths, tol=cfg.tol)
            div = gens._div_kernel(gen, T, X)
        else:
            T, _ = dual_batch(gen, X, lengths, tol=cfg.tol, inner_tol=cfg.inner_tol)
            div = gens._div_kernel(gen, X, T)
        heads = np.where(mask, div, 0.0).sum(axis=1).reshape(m, ks.size)
        tail_block = cum_tail[start:stop]
        tails_k = tail_block[:, [V - 1]] - tail_block[:, ks - 1]
        out[start:stop] = heads + tails_k + cfg.lam * ks[None, :]
    return out


def _decode_prepared(arr, ev: _CurveEvaluator, cfg: DecodeConfig, collect: bool):
    cap = cfg.k_cap(arr.size)
    k_star = _STRATEGIES[cfg.search](ev, cap)
    probs_desc, nu = ev.renorm_at(k_star)
    cost = ev.cost(k_star)
    values, indices = select_top_k(arr, k_star)
    asc = np.argsort(indices)
    return DecodeResult(
        k_star=k_star,
        support=indices[asc],
        support_probs=probs_desc[asc],
        nu=nu,
        cost=cost,
        size=arr.size,
        k_cap=cap,
        cost_curve=ev.evaluated() if collect else None,
    )


def decode(p, cfg: DecodeConfig, collect_cost_curve: bool = False) -> DecodeResult:
    """Decode one distribution: pick k*, renormalize its top-k* entries."""
    arr, ev = _evaluator(p, cfg)
    return _decode_prepared(arr, ev, cfg, collect_cost_curve)


def decode_batch(P, cfg: DecodeConfig, collect_cost_curve: bool = False) -> list:
    """Decode each row of a batch, sharing the sorted prefix machinery.

    Rows are independent; callers streaming very large batches should chunk
    them to bound the memory of the (n, V) sort.
    """
    A = check_prob_matrix(P)
    W = np.sort(A, axis=1)[:, ::-1]
    cum_w = np.cumsum(W, axis=1)
    gen = cfg.generator
    if cfg.mode == "primal":
        tails = gens._tail_div_primal(gen, W)
    else:
        tails = gens._tail_div_dual(gen, W)
    cum_tail = np.cumsum(tails, axis=1)
    cum_sqrt = None
    if cfg.mode == "primal" and gen.kind == gens.KIND_ALPHA and abs(gen.alpha - 1.5) < CLOSED_FORM_TOL:
        cum_sqrt = np.cumsum(np.sqrt(W), axis=1)
    results = []
    for i in range(A.shape[0]):
        ev = _CurveEvaluator(
            W[i], cfg,
            cum_w=cum_w[i],
            cum_tail=cum_tail[i],
            cum_sqrt=None if cum_sqrt is None else cum_sqrt[i],
        )
        results.append(_decode_prepared(A[i], ev, cfg, collect_cost_curve))
    return results


# ---------------------------------------------------------------------------
# fixed-k renormalization and sampling
# ---------------------------------------------------------------------------


def renormalize(generator, x, mode: str = "primal", tol: float = DEFAULT_TOL) -> RenormResult:
    """Renormalize a sub-probability vector under either placement."""
    gen = gens.generator_from_alpha(generator)
    if mode == "primal":
        return renorm_primal(gen, x, tol=tol)
    if mode == "dual":
        return renorm_dual(gen, x, tol=tol)
    raise InputError(f"mode must be 'primal' or 'dual', got {mode!r}")


def top_k_renormalize(p, k: int, generator, mode: str = "primal", tol: float = DEFAULT_TOL):
    """Generalized top-k decoding at fixed k.

    Returns (support, support_probs, nu) with ascending support indices.
    """
    arr = check_prob_vector(p)
    values, indices = select_top_k(arr, k)
    rr = renormalize(generator, values, mode=mode, tol=tol)
    asc = np.argsort(indices)
    return indices[asc], rr.probs[asc], rr.nu


def sample(result: DecodeResult, seed: int) -> int:
    """One inverse-CDF draw from the decoded distribution; deterministic in
    the seed."""
    return int(sample_many(result, 1, seed)[0])


def sample_many(result: DecodeResult, n: int, seed) -> np.ndarray:
    """n seeded inverse-CDF draws of original token indices."""
    if n < 0:
        raise InputError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(result.support_probs)
    cdf /= cdf[-1]
    u = rng.random(n)
    pos = np.searchsorted(cdf, u, side="right")
    pos = np.minimum(pos, result.support.size - 1)
    return result.support[pos]
