"""Sparse decoding of probability vectors via l0-regularized Bregman
projection.

Keeping the k largest entries of a distribution and renormalizing them is
the minimizer of a separable Bregman divergence to the original distribution
plus a per-token sparsity cost; the optimal k is found in logarithmic time
because the cost is discretely convex in k.  Standard top-k truncation is
the Shannon (alpha = 1) member of the family.
"""

from .decoder import (
    DecodeConfig,
    DecodeResult,
    cost_at_k,
    cost_curve,
    cost_curve_batch,
    decode,
    decode_batch,
    find_k_star,
    logits_to_probs,
    renormalize,
    sample,
    sample_many,
    select_top_k,
    top_k_renormalize,
)
from .errors import (
    BracketError,
    BregmanDecodingError,
    ConvergenceError,
    DomainError,
    GeneratorError,
    InputError,
    MultipleCrossingsError,
    RangeError,
    SizeError,
    TieError,
    UnsupportedGeneratorError,
)
from .generators import (
    GeneratorSpec,
    alpha_entropy,
    argmax_limit,
    bregman_div,
    conj,
    d2phi,
    dphi,
    dphi_inv,
    generator_from_alpha,
    phi,
    shannon,
    water_filling_limit,
)
from .renorm_dual import DualInnerProblem, dual_inner_solve, renorm_dual
from .renorm_primal import (
    RenormResult,
    renorm_additive_shift,
    renorm_argmax_deficit,
    renorm_primal,
    renorm_primal_generic,
    renorm_sqrt_shift,
    renorm_sum_division,
    renorm_water_filling,
)
from .rootfind import Bracket, bisect_monotone

__version__ = "0.1.0"


def __getattr__(name):
    # the sklearn/scipy stack is heavy; only load it when the estimator is
    # actually requested so the CLI stays fast to start
    if name == "BregmanDecoder":
        from .estimator import BregmanDecoder

        return BregmanDecoder
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

__all__ = [
    "BracketError",
    "Bracket",
    "BregmanDecoder",
    "BregmanDecodingError",
    "ConvergenceError",
    "DecodeConfig",
    "DecodeResult",
    "DomainError",
    "DualInnerProblem",
    "GeneratorError",
    "GeneratorSpec",
    "InputError",
    "MultipleCrossingsError",
    "RangeError",
    "RenormResult",
    "SizeError",
    "TieError",
    "UnsupportedGeneratorError",
    "alpha_entropy",
    "argmax_limit",
    "bisect_monotone",
    "bregman_div",
    "conj",
    "cost_at_k",
    "cost_curve",
    "cost_curve_batch",
    "d2phi",
    "decode",
    "decode_batch",
    "dphi",
    "dphi_inv",
    "dual_inner_solve",
    "find_k_star",
    "generator_from_alpha",
    "logits_to_probs",
    "phi",
    "renorm_additive_shift",
    "renorm_argmax_deficit",
    "renorm_dual",
    "renorm_primal",
    "renorm_primal_generic",
    "renorm_sqrt_shift",
    "renorm_sum_division",
    "renorm_water_filling",
    "renormalize",
    "sample",
    "sample_many",
    "select_top_k",
    "shannon",
    "top_k_renormalize",
    "water_filling_limit",
]
