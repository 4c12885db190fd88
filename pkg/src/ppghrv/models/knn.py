"""K-nearest-neighbour regression over z-normalised features.

The training set is memorised in float32 (the serialised width) together
with the per-feature standardisation statistics, so a decoded model sees
exactly the numbers the in-memory one does.  Distance ties break to the
lower training-sample index.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, EmptyDataset, KTooLarge
from .base import ModelKind, TrainMeta, TrainedModel

MIN_K = 2
MAX_K = 30

MANHATTAN = "manhattan"
EUCLIDEAN = "euclidean"
DISTANCES = (MANHATTAN, EUCLIDEAN)


def standardize_stats(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature mean and population std; zero stds become 1."""
    mu = X.mean(axis=0)
    sigma = X.std(axis=0)
    sigma = np.where(sigma == 0.0, 1.0, sigma)
    return mu, sigma


class KnnRegressor(TrainedModel):
    kind = ModelKind.KNN

    def __init__(
        self,
        X: np.ndarray,       # float32, already standardised
        y: np.ndarray,       # float64
        mu: np.ndarray,      # float32
        sigma: np.ndarray,   # float32
        k: int,
        distance: str,
        meta: TrainMeta,
    ):
        super().__init__(meta)
        self.X = X
        self.y = y
        self.mu = mu
        self.sigma = sigma
        self.k = int(k)
        self.distance = distance

    def _predict_batch(self, Q: np.ndarray) -> np.ndarray:
        Xt = self.X.astype(np.float64)
        q = (Q - self.mu.astype(np.float64)) / self.sigma.astype(np.float64)
        out = np.empty(Q.shape[0], dtype=np.float64)
        for r in range(q.shape[0]):
            diff = Xt - q[r]
            if self.distance == MANHATTAN:
                d = np.abs(diff).sum(axis=1)
            else:
                d = np.sqrt((diff * diff).sum(axis=1))
            near = np.argsort(d, kind="stable")[: self.k]
            out[r] = float(np.mean(self.y[near]))
        return out


def train_knn(train, k: int, distance: str) -> KnnRegressor:
    if distance not in DISTANCES:
        raise ConfigError(f"distance must be one of {DISTANCES}, got {distance!r}")
    if len(train) == 0:
        raise EmptyDataset("cannot train KNN on an empty dataset")
    if not MIN_K <= int(k) <= MAX_K:
        raise ConfigError(f"k must be in [{MIN_K}, {MAX_K}], got {k}")
    if int(k) > len(train):
        raise KTooLarge(f"k={k} exceeds the {len(train)} training samples")
    X64 = train.features
    mu, sigma = standardize_stats(X64)
    mu32 = mu.astype(np.float32)
    sigma32 = sigma.astype(np.float32)
    Xs = ((X64 - mu32.astype(np.float64)) / sigma32.astype(np.float64)).astype(np.float32)
    meta = TrainMeta(
        hyperparams={"k": int(k), "distance": distance},
        seed=0,
        n_features=X64.shape[1],
    )
    return KnnRegressor(Xs, train.labels.copy(), mu32, sigma32, int(k), distance, meta)
