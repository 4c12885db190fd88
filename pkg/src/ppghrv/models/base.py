"""Shared surface of the trained regressors.

Every model is an immutable container of learned parameters with a uniform
predict interface; training lives in free functions so a model object can
never be half-fitted.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping

import numpy as np

from ..errors import FeatureLengthMismatch


class ModelKind(Enum):
    DT = "dt"
    RF = "rf"
    KNN = "knn"
    MLP = "mlp"


@dataclass(frozen=True)
class TrainMeta:
    """How a model was produced; carried for provenance and codec checks."""

    hyperparams: Mapping[str, Any]
    seed: int
    n_features: int


class TrainedModel:
    """Base class: feature-length checks and batch/single prediction glue."""

    kind: ModelKind

    def __init__(self, meta: TrainMeta):
        self.meta = meta

    @property
    def n_features(self) -> int:
        return self.meta.n_features

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise FeatureLengthMismatch(
                f"model expects {self.n_features} features, got shape {X.shape}"
            )
        return X

    def predict(self, features) -> float:
        out = self.predict_batch(np.asarray(features, dtype=np.float64)[None, :])
        return float(out[0])

    def predict_batch(self, X) -> np.ndarray:
        return self._predict_batch(self._check(X))

    def _predict_batch(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError
