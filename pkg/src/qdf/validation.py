"""Input checks used by the estimator wrappers."""
from __future__ import annotations

import numpy as np

from .codes import ClassicalCode, CssCode, StabiliserCode, as_detector_model
from .dem import DetectorModel
from .gf2 import BitMatrix


def check_binary_matrix(X, name: str = "X") -> BitMatrix:
    """Return ``X`` as a :class:`BitMatrix`, rejecting anything not 2-D and 0/1."""
    if isinstance(X, BitMatrix):
        return X
    arr = np.asarray(X)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got {arr.ndim}-D")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0 and 1")
    return BitMatrix.from_dense(arr.astype(np.uint8))


def check_code(X):
    """Codes and detector models pass through; a bare matrix is a classical parity check."""
    if isinstance(X, (ClassicalCode, CssCode, StabiliserCode, DetectorModel)):
        return X
    return ClassicalCode(H=check_binary_matrix(X))


def check_detector_model(X, basis: str = "Z", rep: int = 3) -> DetectorModel:
    """Detector model for ``X``, which may be a model, a code or a parity-check matrix."""
    dem = as_detector_model(check_code(X), basis, rep)
    if dem.H.cols != dem.L.cols:
        raise ValueError("detector and observable matrices disagree on the number of errors")
    return dem
