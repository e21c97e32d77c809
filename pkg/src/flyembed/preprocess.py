"""Whole-dataset preprocessing transforms applied before projection.

Statistics (row minima, mean vector) are always taken from the dataset
being transformed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DenseDataset
from .errors import ZeroMeanColumn, ZeroNormVector

KINDS = ("none", "original", "mean_center", "l2_normalize", "center_normalize")
DEFAULT_R = 100.0


@dataclass(frozen=True)
class PreprocessSpec:
    kind: str = "none"
    r: float = DEFAULT_R

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown preprocessing {self.kind!r}; choose from {KINDS}")
        if self.kind == "original" and not self.r > 0:
            raise ValueError("target mean r must be positive")


def _wrap(values: np.ndarray, X: DenseDataset, suffix: str) -> DenseDataset:
    tag = f"{X.source_tag}|{suffix}" if X.source_tag else suffix
    return DenseDataset(values, tag)


def preprocess_original(X: DenseDataset, r: float = DEFAULT_R) -> DenseDataset:
    """Shift every component by |row minimum|, rescale each vector to mean ``r``, floor.

    The shift is applied unconditionally, also for rows whose minimum is
    positive. The output holds nonnegative integers stored as float64.
    """
    if not r > 0:
        raise ValueError("target mean r must be positive")
    shifted = X.values + np.abs(X.values.min(axis=1, keepdims=True))
    means = shifted.mean(axis=0)
    zero = np.flatnonzero(means <= 0)
    if len(zero):
        raise ZeroMeanColumn(int(zero[0]))
    # multiply before dividing so exact integer quotients are not floored down
    return _wrap(np.floor(shifted * r / means), X, "original")


def mean_center(X: DenseDataset) -> DenseDataset:
    return _wrap(X.values - X.values.mean(axis=1, keepdims=True), X, "mean_center")


def _unit_columns(values: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(values, axis=0)
    zero = np.flatnonzero(norms == 0)
    if len(zero):
        raise ZeroNormVector(int(zero[0]))
    return values / norms


def l2_normalize(X: DenseDataset) -> DenseDataset:
    return _wrap(_unit_columns(X.values), X, "l2_normalize")


def center_normalize(X: DenseDataset) -> DenseDataset:
    """Mean centering followed by per-vector L2 normalization."""
    return _wrap(_unit_columns(mean_center(X).values), X, "center_normalize")


def apply_preprocess(X: DenseDataset, spec: PreprocessSpec | str) -> DenseDataset:
    if isinstance(spec, str):
        spec = PreprocessSpec(spec)
    if spec.kind == "none":
        return X
    if spec.kind == "original":
        return preprocess_original(X, spec.r)
    return {"mean_center": mean_center,
            "l2_normalize": l2_normalize,
            "center_normalize": center_normalize}[spec.kind](X)
