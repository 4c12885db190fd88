"""Bagged regression trees; prediction is the mean over the ensemble."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, EmptyDataset
from .base import ModelKind, TrainMeta, TrainedModel
from .tree import MAX_TREE_DEPTH, TreeNodes, _grow, _predict_rows

MIN_TREES = 2
MAX_TREES = 128


class RandomForest(TrainedModel):
    kind = ModelKind.RF

    def __init__(self, trees: tuple[TreeNodes, ...], meta: TrainMeta):
        super().__init__(meta)
        self.trees = trees
        self._walk = [
            (
                t.feature.tolist(),
                t.threshold.astype(np.float64).tolist(),
                t.left.tolist(),
                t.right.tolist(),
                t.value.tolist(),
            )
            for t in trees
        ]

    def _predict_batch(self, X: np.ndarray) -> np.ndarray:
        acc = np.zeros(X.shape[0], dtype=np.float64)
        for walk in self._walk:
            acc += _predict_rows(*walk, X)
        return acc / len(self._walk)


def train_rf(
    train,
    trees: int,
    max_depth: int,
    seed: int = 0,
    bootstrap: bool = True,
) -> RandomForest:
    """Bagging: each tree sees a bootstrap resample drawn from its own
    derived seed.  bootstrap=False trains every tree on the full data,
    which collapses the ensemble to a single deterministic tree.
    """
    if not MIN_TREES <= int(trees) <= MAX_TREES:
        raise ConfigError(f"trees must be in [{MIN_TREES}, {MAX_TREES}], got {trees}")
    if not 1 <= int(max_depth) <= MAX_TREE_DEPTH:
        raise ConfigError(f"max_depth must be in [1, {MAX_TREE_DEPTH}], got {max_depth}")
    if len(train) == 0:
        raise EmptyDataset("cannot train a forest on an empty dataset")
    X = train.features
    y = train.labels
    m = y.size
    grown = []
    for t in range(int(trees)):
        if bootstrap:
            rng = np.random.default_rng(np.random.SeedSequence((int(seed), t)))
            idx = rng.integers(0, m, size=m)
            grown.append(_grow(X[idx], y[idx], int(max_depth)))
        else:
            grown.append(_grow(X, y, int(max_depth)))
    meta = TrainMeta(
        hyperparams={
            "trees": int(trees),
            "max_depth": int(max_depth),
            "bootstrap": bool(bootstrap),
        },
        seed=int(seed),
        n_features=X.shape[1],
    )
    return RandomForest(tuple(grown), meta)
