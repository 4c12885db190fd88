"""Regression tree grown by exhaustive variance-reduction splits.

Split search is vectorised per feature with prefix sums, so each node costs
O(d * n log n).  Thresholds are stored as float32 (the serialised width) and
the partition is made with the quantised value, keeping file round-trips
bit-identical with in-memory predictions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, EmptyDataset, FeatureLengthMismatch
from .base import ModelKind, TrainMeta, TrainedModel

MIN_SAMPLES_TO_SPLIT = 2
LEAF = -1  # sentinel in the feature column

MAX_TREE_DEPTH = 20


@dataclass(frozen=True)
class TreeNodes:
    """Flat preorder node arrays; feature == LEAF marks a leaf."""

    feature: np.ndarray    # int32
    threshold: np.ndarray  # float32, x <= threshold goes left
    left: np.ndarray       # int32 child index
    right: np.ndarray      # int32 child index
    value: np.ndarray      # float64 leaf prediction

    def __len__(self) -> int:
        return int(self.feature.size)


def _best_split(X: np.ndarray, y: np.ndarray):
    """Lowest-SSE axis split, or None.

    Ties break to the lowest feature index, then the lowest threshold.  A
    candidate whose float32-quantised threshold no longer separates the
    sorted values is discarded.
    """
    n, d = X.shape
    total_s1 = float(y.sum())
    total_s2 = float((y * y).sum())
    best_sse = np.inf
    best = None
    for f in range(d):
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        ys = y[order]
        if xs[0] == xs[-1]:
            continue
        c1 = np.cumsum(ys)[:-1]
        c2 = np.cumsum(ys * ys)[:-1]
        nl = np.arange(1, n, dtype=np.float64)
        nr = n - nl
        sse = (c2 - c1 * c1 / nl) + (total_s2 - c2) - (total_s1 - c1) ** 2 / nr
        sse[xs[:-1] == xs[1:]] = np.inf
        while True:
            i = int(np.argmin(sse))
            if not np.isfinite(sse[i]) or sse[i] >= best_sse:
                break
            thr = np.float32((xs[i] + xs[i + 1]) / 2.0)
            n_left = int(np.searchsorted(xs, thr, side="right"))
            if 0 < n_left < n:
                best_sse = float(sse[i])
                best = (f, thr)
                break
            sse[i] = np.inf  # quantisation collapsed this boundary
    return best


def _grow(X: np.ndarray, y: np.ndarray, max_depth: int) -> TreeNodes:
    feature, threshold, left, right, value = [], [], [], [], []

    def leaf(node_y) -> int:
        idx = len(feature)
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(np.mean(node_y)))
        return idx

    def rec(node_X, node_y, depth) -> int:
        if (
            depth >= max_depth
            or node_y.size < MIN_SAMPLES_TO_SPLIT
            or np.all(node_y == node_y[0])
        ):
            return leaf(node_y)
        split = _best_split(node_X, node_y)
        if split is None:
            return leaf(node_y)
        f, thr = split
        idx = len(feature)
        feature.append(f)
        threshold.append(float(thr))
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        mask = node_X[:, f] <= np.float64(thr)
        left[idx] = rec(node_X[mask], node_y[mask], depth + 1)
        right[idx] = rec(node_X[~mask], node_y[~mask], depth + 1)
        return idx

    rec(X, y, 0)
    return TreeNodes(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float32),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=np.asarray(value, dtype=np.float64),
    )


def _predict_rows(feature, threshold, left, right, value, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0], dtype=np.float64)
    for r, row in enumerate(X.tolist()):
        i = 0
        while feature[i] != LEAF:
            i = left[i] if row[feature[i]] <= threshold[i] else right[i]
        out[r] = value[i]
    return out


class DecisionTree(TrainedModel):
    kind = ModelKind.DT

    def __init__(self, nodes: TreeNodes, meta: TrainMeta):
        super().__init__(meta)
        self.nodes = nodes
        # plain lists make the per-row walk cheap for latency benchmarks
        self._feature = nodes.feature.tolist()
        self._threshold = nodes.threshold.astype(np.float64).tolist()
        self._left = nodes.left.tolist()
        self._right = nodes.right.tolist()
        self._value = nodes.value.tolist()

    def depth(self) -> int:
        def walk(i):
            if self._feature[i] == LEAF:
                return 0
            return 1 + max(walk(self._left[i]), walk(self._right[i]))

        return walk(0)

    def n_nodes(self) -> int:
        return len(self.nodes)

    def predict(self, features) -> float:
        row = list(features)
        if len(row) != self.n_features:
            raise FeatureLengthMismatch(
                f"model expects {self.n_features} features, got {len(row)}"
            )
        i = 0
        feature, threshold = self._feature, self._threshold
        left, right = self._left, self._right
        while feature[i] != LEAF:
            i = left[i] if row[feature[i]] <= threshold[i] else right[i]
        return self._value[i]

    def _predict_batch(self, X: np.ndarray) -> np.ndarray:
        return _predict_rows(
            self._feature, self._threshold, self._left, self._right, self._value, X
        )


def train_dt(train, max_depth: int, seed: int = 0) -> DecisionTree:
    """Greedy CART regressor; leaves predict the mean of their labels.

    max_depth 1 is allowed (a single split) even though hyperparameter
    search only samples 3..20; the tiny trees are useful as oracles.
    """
    if not 1 <= int(max_depth) <= MAX_TREE_DEPTH:
        raise ConfigError(f"max_depth must be in [1, {MAX_TREE_DEPTH}], got {max_depth}")
    if len(train) == 0:
        raise EmptyDataset("cannot train a tree on an empty dataset")
    X = train.features
    y = train.labels
    nodes = _grow(X, y, int(max_depth))
    meta = TrainMeta(
        hyperparams={"max_depth": int(max_depth)},
        seed=int(seed),
        n_features=X.shape[1],
    )
    return DecisionTree(nodes, meta)
