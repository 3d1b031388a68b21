"""Scikit-learn style transformer wrapping the decoder.

The transformer is stateless (fit only validates and records the input
width), so it drops into pipelines that post-process predicted probability
matrices.  Output is a sparse CSR matrix: decoded rows typically keep a few
dozen of potentially tens of thousands of columns.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator, TransformerMixin

from .decoder import DecodeConfig, decode_batch, logits_to_probs, top_k_renormalize
from .errors import InputError
from .validation import check_prob_matrix


class BregmanDecoder(BaseEstimator, TransformerMixin):
    """Sparsify probability rows by adaptive (or fixed-k) renormalization.

    Parameters
    ----------
    alpha : float or str, default=1.0
        Family parameter; "shannon", "inf" and "-inf" are accepted, and
        alpha = 1 reproduces plain top-k renormalization.
    mode : {"primal", "dual"}, default="primal"
        Which argument of the divergence holds the estimate.
    lam : float, default=0.01
        Sparsity cost per kept token (ignored when ``k`` is set).
    k : int or None, default=None
        Fixed sparsity; None selects k adaptively per row.
    k_max : int or None, default=None
        Cap on the adaptive search range.
    search : {"binary", "exponential", "linear"}, default="binary"
    tol : float, default=1e-12
        Root-finding tolerance.
    temperature : float, default=1.0
        Softmax temperature, used only when ``input_type="logits"``.
    input_type : {"probs", "logits"}, default="probs"
    """

    def __init__(
        self,
        alpha=1.0,
        mode="primal",
        lam=0.01,
        k=None,
        k_max=None,
        search="binary",
        tol=1e-12,
        temperature=1.0,
        input_type="probs",
    ):
        self.alpha = alpha
        self.mode = mode
        self.lam = lam
        self.k = k
        self.k_max = k_max
        self.search = search
        self.tol = tol
        self.temperature = temperature
        self.input_type = input_type

    def _config(self) -> DecodeConfig:
        return DecodeConfig(
            generator=self.alpha,
            mode=self.mode,
            lam=self.lam,
            k_max=self.k_max,
            search=self.search,
            tol=self.tol,
            temperature=self.temperature,
        )

    def _rows(self, X) -> np.ndarray:
        if self.input_type == "logits":
            X = np.asarray(X, dtype=np.float64)
            if X.ndim != 2:
                raise InputError(f"expected a 2-d array, got shape {X.shape}")
            return np.vstack([logits_to_probs(row, self.temperature) for row in X])
        if self.input_type != "probs":
            raise InputError("input_type must be 'probs' or 'logits'")
        return check_prob_matrix(X)

    def fit(self, X, y=None):
        """Validate parameters and record the input width; no state is fit."""
        if self.k is None:
            self._config()
        rows = self._rows(X)
        self.n_features_in_ = rows.shape[1]
        return self

    def transform(self, X) -> sparse.csr_matrix:
        """Decode each row; returns CSR with zeros off each row's support."""
        rows = self._rows(X)
        n, width = rows.shape
        data, indices, indptr = [], [], [0]
        if self.k is not None:
            for row in rows:
                support, probs, _ = top_k_renormalize(
                    row, self.k, self.alpha, mode=self.mode, tol=self.tol
                )
                indices.append(support)
                data.append(probs)
                indptr.append(indptr[-1] + support.size)
        else:
            cfg = self._config()
            for res in decode_batch(rows, cfg):
                indices.append(res.support)
                data.append(res.support_probs)
                indptr.append(indptr[-1] + res.support.size)
        return sparse.csr_matrix(
            (np.concatenate(data), np.concatenate(indices), np.array(indptr)),
            shape=(n, width),
        )
