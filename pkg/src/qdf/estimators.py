"""scikit-learn style wrappers around the distance methods and transforms."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .codes import from_block, to_block
from .decoder import DecoderConfig, bp_osd_decode
from .dem import DetectorModel, filter_dem
from .methods import METHODS, JobConfig, run_method
from .validation import check_binary_matrix, check_code, check_detector_model


class DistanceEstimator(BaseEstimator):
    """Minimum distance by any registered method.

    ``fit`` takes a code, a detector model or a parity-check matrix and sets
    ``distance_`` (best known value), ``lower_bound_``, ``upper_bound_``,
    ``result_`` and ``stats_`` (trial statistics for randomised methods).
    """

    def __init__(self, method: str = "bz", max_time: float | None = None, iters: int | None = None,
                 seed: int = 0, rep: int | None = None, basis: str = "Z", n_jobs: int = 1):
        self.method = method
        self.max_time = max_time
        self.iters = iters
        self.seed = seed
        self.rep = rep
        self.basis = basis
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        code = check_code(X)
        cfg = JobConfig(self.method, "", self.max_time, self.iters, self.seed, self.rep,
                        self.basis.upper(), self.n_jobs)
        res = run_method(code, cfg)
        self.result_ = res
        self.distance_ = res.distance
        self.lower_bound_ = res.d_lower
        self.upper_bound_ = res.d_upper
        self.stats_ = res.stats
        return self


class BlockRepresentation(TransformerMixin, BaseEstimator):
    """Two-block Pauli rows to ``rep`` blocks and back."""

    def __init__(self, rep: int = 3, strict: bool = True):
        self.rep = rep
        self.strict = strict

    def fit(self, X, y=None):
        M = check_binary_matrix(X)
        if M.cols % 2:
            raise ValueError("two-block rows need an even number of columns")
        self.n_qubits_ = M.cols // 2
        return self

    def transform(self, X):
        check_is_fitted(self)
        return to_block(check_binary_matrix(X), self.rep).to_dense()

    def inverse_transform(self, X):
        check_is_fitted(self)
        return from_block(check_binary_matrix(X), self.rep, strict=self.strict).to_dense()


class DemBuilder(TransformerMixin, BaseEstimator):
    """Code (or parity-check matrix) to detector error model."""

    def __init__(self, basis: str = "Z", rep: int = 3):
        self.basis = basis
        self.rep = rep

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> DetectorModel:
        return check_detector_model(X, self.basis.upper(), self.rep)


class DemFilter(TransformerMixin, BaseEstimator):
    """Keep the detectors of one basis and the errors supported on them."""

    def __init__(self, basis: str = "Z"):
        self.basis = basis

    def fit(self, X, y=None):
        if not isinstance(X, DetectorModel):
            raise TypeError("DemFilter needs a DetectorModel")
        return self

    def transform(self, X) -> DetectorModel:
        if not isinstance(X, DetectorModel):
            raise TypeError("DemFilter needs a DetectorModel")
        return filter_dem(X, self.basis.upper())


class BpOsdDecoder(BaseEstimator):
    """Belief propagation with ordered-statistics post-processing.

    ``fit(H)`` stores the parity-check matrix; ``predict`` maps an array of
    syndromes, one per row, to corrections.
    """

    def __init__(self, bp_iters: int = 100, osd_order: int = 1, priors=0.05):
        self.bp_iters = bp_iters
        self.osd_order = osd_order
        self.priors = priors

    def fit(self, X, y=None):
        self.H_ = check_binary_matrix(X, "H").to_dense()
        self.config_ = DecoderConfig(self.bp_iters, self.osd_order, self.priors)
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self)
        S = np.atleast_2d(np.asarray(X, dtype=np.uint8))
        if S.shape[1] != self.H_.shape[0]:
            raise ValueError(f"syndromes need {self.H_.shape[0]} bits")
        return np.array([bp_osd_decode(self.H_, s, self.config_).to_dense() for s in S], np.uint8)
