"""Convex generators for Bregman divergences on [0, 1].

The supported family is the power-entropy generator

    phi(x) = x**alpha / (alpha * (alpha - 1)),   alpha not in {0, 1},

together with its alpha -> 1 limit phi(x) = x * log(x) (Shannon) and two
symbolic limit kinds (alpha -> +inf and alpha -> -inf) whose renormalization
maps exist only in closed form.  Each generator carries validity flags that
gate the primal and dual decoding paths.

Derived scalar maps: phi, its derivative, the clamped inverse of the
derivative, the second derivative, the pointwise Bregman divergence, and the
Legendre conjugate.  All of them broadcast over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GeneratorError, UnsupportedGeneratorError

KIND_ALPHA = "alpha-entropy"
KIND_SHANNON = "shannon"
KIND_LIMIT_POS = "limit+inf"
KIND_LIMIT_NEG = "limit-inf"

# |alpha - 1| below this is routed to the Shannon branch: 1/(alpha - 1)
# cancels catastrophically and both branches define the same decoder.
SHANNON_WINDOW = 1e-9

# Extended-real sentinel for phi'(0) of generators singular at zero.  It is
# only ever compared against, never fed into arithmetic.
NEG_INF = float("-inf")


@dataclass(frozen=True)
class GeneratorSpec:
    """Immutable description of one Bregman generator."""

    kind: str
    alpha: float | None = None

    @property
    def is_limit(self) -> bool:
        return self.kind in (KIND_LIMIT_POS, KIND_LIMIT_NEG)

    @property
    def is_primal_valid(self) -> bool:
        """Convex and C1 on [0, 1], strictly convex inside (Shannon and every
        power entropy with alpha != 0).  Limit kinds are served by dedicated
        closed forms instead."""
        if self.kind == KIND_SHANNON:
            return True
        return self.kind == KIND_ALPHA

    @property
    def is_dual_valid(self) -> bool:
        """True exactly for power entropies with alpha > 1: those satisfy
        x * phi''(x) -> 0 and second-argument convexity of the divergence on
        [x, 1].  Shannon fails the limit (x * phi''(x) = 1)."""
        return self.kind == KIND_ALPHA and self.alpha is not None and self.alpha > 1.0

    @property
    def singular_at_zero(self) -> bool:
        """phi'(0) = -inf (Shannon and alpha < 1)."""
        if self.kind == KIND_SHANNON:
            return True
        return self.kind == KIND_ALPHA and self.alpha is not None and self.alpha < 1.0

    def __str__(self) -> str:
        if self.kind == KIND_ALPHA:
            return f"alpha-entropy({self.alpha:g})"
        return self.kind


def shannon() -> GeneratorSpec:
    """Generator x*log(x), the alpha -> 1 limit; induces sum-division."""
    return GeneratorSpec(KIND_SHANNON)


def alpha_entropy(alpha: float) -> GeneratorSpec:
    """Power-entropy generator with parameter ``alpha``.

    alpha = 0 is excluded (the formula degenerates); alpha within
    ``SHANNON_WINDOW`` of 1 is routed to the Shannon branch.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise GeneratorError(f"alpha must be finite, got {alpha!r}")
    if alpha == 0.0:
        raise GeneratorError("alpha = 0 is outside the supported index set")
    if abs(alpha - 1.0) < SHANNON_WINDOW:
        return shannon()
    return GeneratorSpec(KIND_ALPHA, alpha)


def water_filling_limit() -> GeneratorSpec:
    """Symbolic alpha -> +inf generator (water-filling renormalization)."""
    return GeneratorSpec(KIND_LIMIT_POS)


def argmax_limit() -> GeneratorSpec:
    """Symbolic alpha -> -inf generator (all deficit mass to the argmax)."""
    return GeneratorSpec(KIND_LIMIT_NEG)


def generator_from_alpha(alpha) -> GeneratorSpec:
    """Build a GeneratorSpec from a CLI-style alpha value.

    Accepts a real number, the strings "shannon", "inf", "-inf", or the
    corresponding float infinities.
    """
    if isinstance(alpha, GeneratorSpec):
        return alpha
    if isinstance(alpha, str):
        token = alpha.strip().lower()
        if token == "shannon":
            return shannon()
        if token in ("inf", "+inf", "infinity"):
            return water_filling_limit()
        if token == "-inf":
            return argmax_limit()
        try:
            alpha = float(token)
        except ValueError as exc:
            raise GeneratorError(f"unrecognized alpha {alpha!r}") from exc
    alpha = float(alpha)
    if math.isinf(alpha):
        return water_filling_limit() if alpha > 0 else argmax_limit()
    return alpha_entropy(alpha)


# ---------------------------------------------------------------------------
# internal kernels (no domain checks; assume validated inputs)
# ---------------------------------------------------------------------------


def _int_pow(x: np.ndarray, n: int) -> np.ndarray:
    """x**n for integer n via repeated squaring (much faster than np.power)."""
    if n == 0:
        return np.ones_like(x)
    if n < 0:
        with np.errstate(divide="ignore"):
            # 0 ** -n = inf is the intended extended value
            return 1.0 / _int_pow(x, -n)
    result = None
    base = x
    while n:
        if n & 1:
            result = base.copy() if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _fast_pow(x: np.ndarray, e: float) -> np.ndarray:
    """x**e with fast paths for integer and quarter-integer exponents.

    Exact powers of sqrt keep the hot renormalization loops off np.power for
    the common alpha grid; the general case falls back to np.power.
    """
    x = np.asarray(x, dtype=np.float64)
    for scale, root in ((1, None), (2, "half"), (4, "quarter")):
        se = e * scale
        if abs(se) < 2**31 and se == int(se):
            if root is None:
                return _int_pow(x, int(se))
            base = np.sqrt(x)
            if root == "quarter":
                base = np.sqrt(base)
            return _int_pow(base, int(se))
    return np.power(x, e)


def _phi_kernel(gen: GeneratorSpec, x: np.ndarray) -> np.ndarray:
    if gen.kind == KIND_SHANNON:
        out = np.zeros_like(x)
        pos = x > 0.0
        xp = x[pos]
        out[pos] = xp * np.log(xp)
        return out
    a = gen.alpha
    out = _fast_pow(x, a) / (a * (a - 1.0))
    if a < 0.0:
        # x**alpha := +inf at x = 0, so phi(0) = +inf as well
        out = np.where(x == 0.0, np.inf, out)
    return out


def _f_kernel(gen: GeneratorSpec, x: np.ndarray) -> np.ndarray:
    """phi'(x); -inf sentinel at x = 0 for generators singular at zero."""
    if gen.kind == KIND_SHANNON:
        out = np.full_like(x, NEG_INF)
        pos = x > 0.0
        out[pos] = np.log(x[pos]) + 1.0
        return out
    a = gen.alpha
    if a > 1.0:
        return _fast_pow(x, a - 1.0) / (a - 1.0)
    out = np.full_like(x, NEG_INF)
    pos = x > 0.0
    out[pos] = _fast_pow(x[pos], a - 1.0) / (a - 1.0)
    return out


def _f_at_one(gen: GeneratorSpec) -> float:
    if gen.kind == KIND_SHANNON:
        return 1.0
    return 1.0 / (gen.alpha - 1.0)


def _f_inv_kernel(gen: GeneratorSpec, y: np.ndarray) -> np.ndarray:
    """Clamped inverse of phi': 0 below phi'(0+), 1 above phi'(1).

    Total, continuous and non-decreasing on the whole extended real line;
    -inf maps to 0 by comparison, never by arithmetic.
    """
    f1 = _f_at_one(gen)
    if gen.kind == KIND_SHANNON:
        out = np.ones_like(y)
        below = y < f1
        out[below] = np.exp(y[below] - 1.0)
        out[y == NEG_INF] = 0.0
        return out
    a = gen.alpha
    inv_exp = 1.0 / (a - 1.0)
    if a > 1.0:
        t = np.clip((a - 1.0) * y, 0.0, 1.0)
        return _fast_pow(t, inv_exp)
    # alpha < 1 (and != 0): phi' maps (0, 1] onto (-inf, f1] with f1 < 0
    out = np.ones_like(y)
    below = y < f1
    finite = below & (y != NEG_INF)
    out[finite] = _fast_pow((a - 1.0) * y[finite], inv_exp)
    out[y == NEG_INF] = 0.0
    return out


def _d2_kernel(gen: GeneratorSpec, x: np.ndarray) -> np.ndarray:
    if gen.kind == KIND_SHANNON:
        return 1.0 / x
    return _fast_pow(x, gen.alpha - 2.0)


def _div_kernel(gen: GeneratorSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pointwise Bregman divergence; assumes y in the differentiability
    domain (y > 0 for singular generators except at x = y = 0)."""
    x, y = np.broadcast_arrays(x, y)
    out = np.empty_like(x, dtype=np.float64)
    same = x == y
    out[same] = 0.0
    rest = ~same
    if np.any(rest):
        xr, yr = x[rest], y[rest]
        out[rest] = (
            _phi_kernel(gen, xr)
            - _phi_kernel(gen, yr)
            - _f_kernel(gen, yr) * (xr - yr)
        )
    return out


def _tail_div_primal(gen: GeneratorSpec, y: np.ndarray) -> np.ndarray:
    """d(0, y), the primal cost of zeroing an entry of mass y.

    Closed form: y**alpha / alpha for power entropies and y for Shannon.
    """
    if gen.kind == KIND_SHANNON:
        return np.asarray(y, dtype=np.float64).copy()
    return _fast_pow(y, gen.alpha) / gen.alpha


def _tail_div_dual(gen: GeneratorSpec, y: np.ndarray) -> np.ndarray:
    """d(y, 0), the dual cost of zeroing an entry; equals phi(y) because
    phi'(0) = 0 for every dual-valid generator (alpha > 1)."""
    if not gen.is_dual_valid:
        raise GeneratorError(f"{gen} has no finite dual tail divergence")
    return _phi_kernel(gen, np.asarray(y, dtype=np.float64))


# ---------------------------------------------------------------------------
# public operations (validated)
# ---------------------------------------------------------------------------


def _as_array(x, lo: float, hi: float, what: str) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=np.float64)
    if np.any(np.isnan(arr)) or np.any(arr < lo) or np.any(arr > hi):
        raise DomainError(f"{what} must lie in [{lo:g}, {hi:g}]")
    return arr, np.isscalar(x) or arr.ndim == 0


def _require_functional(gen: GeneratorSpec) -> None:
    if gen.is_limit:
        raise UnsupportedGeneratorError(
            f"{gen} has no pointwise generator; use its closed-form renormalizer"
        )


def _maybe_scalar(out: np.ndarray, scalar: bool):
    return float(out) if scalar else out


def phi(gen: GeneratorSpec, x):
    """Generator value phi(x) for x in [0, 1].

    Shannon takes its limit value 0 at x = 0; alpha < 0 yields +inf there.
    """
    _require_functional(gen)
    arr, scalar = _as_array(x, 0.0, 1.0, "x")
    return _maybe_scalar(_phi_kernel(gen, arr), scalar)


def dphi(gen: GeneratorSpec, x):
    """Derivative phi'(x) for x in [0, 1], the map inverted by renormalization.

    Returns the -inf sentinel at x = 0 for Shannon and alpha < 1.
    """
    _require_functional(gen)
    arr, scalar = _as_array(x, 0.0, 1.0, "x")
    return _maybe_scalar(_f_kernel(gen, arr), scalar)


def dphi_inv(gen: GeneratorSpec, y):
    """Clamped inverse of phi': total, continuous, non-decreasing on all
    extended reals (0 below phi'(0+), 1 above phi'(1))."""
    _require_functional(gen)
    arr = np.asarray(y, dtype=np.float64)
    if np.any(np.isnan(arr)):
        raise DomainError("y must not be NaN")
    out = _f_inv_kernel(gen, arr)
    return _maybe_scalar(out, np.isscalar(y) or arr.ndim == 0)


def d2phi(gen: GeneratorSpec, x):
    """Second derivative phi''(x); x = 0 is rejected where the formula is
    singular (Shannon and alpha < 2)."""
    _require_functional(gen)
    arr, scalar = _as_array(x, 0.0, 1.0, "x")
    singular = gen.kind == KIND_SHANNON or gen.alpha < 2.0
    if singular and np.any(arr == 0.0):
        raise DomainError(f"phi'' of {gen} is singular at x = 0")
    return _maybe_scalar(_d2_kernel(gen, arr), scalar)


def bregman_div(gen: GeneratorSpec, x, y):
    """Pointwise Bregman divergence d(x, y) = phi(x) - phi(y) - phi'(y)(x - y).

    Nonnegative; zero iff x = y (x = y = 0 included).  y = 0 requires a
    finite phi'(0), i.e. alpha > 1.
    """
    _require_functional(gen)
    xa, _ = _as_array(x, 0.0, 1.0, "x")
    ya, _ = _as_array(y, 0.0, 1.0, "y")
    xb, yb = np.broadcast_arrays(xa, ya)
    finite_at_zero = gen.kind == KIND_ALPHA and gen.alpha > 1.0
    if not finite_at_zero and np.any((yb == 0.0) & (xb != yb)):
        raise DomainError(f"d(x, 0) is not finite for {gen}")
    out = _div_kernel(gen, xb, yb)
    return _maybe_scalar(out, out.ndim == 0 or (np.isscalar(x) and np.isscalar(y)))


def conj(gen: GeneratorSpec, y):
    """Legendre conjugate phi*(y) = y*t - phi(t) at t = dphi_inv(y).

    Arguments outside phi'([0, 1]) are clamped through the extended inverse,
    which extends the conjugate affinely.
    """
    _require_functional(gen)
    arr = np.asarray(y, dtype=np.float64)
    if np.any(np.isnan(arr)):
        raise DomainError("y must not be NaN")
    t = _f_inv_kernel(gen, arr)
    # t = 0 means y <= phi'(0); there the conjugate equals -phi(0) = 0
    out = np.zeros_like(t)
    pos = t > 0.0
    if np.any(pos):
        tp = t[pos]
        out[pos] = arr[pos] * tp - _phi_kernel(gen, tp)
    return _maybe_scalar(out, np.isscalar(y) or arr.ndim == 0)
