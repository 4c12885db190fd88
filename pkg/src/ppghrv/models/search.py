"""Random hyperparameter search with a chronological validation tail.

All candidate configurations are drawn up front from one seeded stream, so
the candidate list depends only on (kind, space, budget, seed).  Candidates
that fail to train are logged and skipped; the winner (lowest validation
MAPE, ties to the earlier candidate) is retrained on the full training set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..data import Dataset, chronological_split
from ..errors import ConfigError, HrvError, SearchExhausted
from ..metrics import mape
from .base import ModelKind, TrainedModel
from .forest import MAX_TREES, MIN_TREES, train_rf
from .knn import DISTANCES, MAX_K, MIN_K, train_knn
from .mlp import (
    ACTIVATIONS,
    MAX_HIDDEN_LAYERS,
    MAX_NEURONS_PER_LAYER,
    MlpTrainingConfig,
    train_mlp,
)
from .tree import MAX_TREE_DEPTH, train_dt

log = logging.getLogger(__name__)

MIN_SEARCH_DEPTH = 3  # search never samples the oracle-sized depths 1..2


@dataclass(frozen=True)
class HyperparamSpace:
    dt_max_depth: tuple[int, int] = (MIN_SEARCH_DEPTH, MAX_TREE_DEPTH)
    rf_trees: tuple[int, int] = (MIN_TREES, MAX_TREES)
    rf_max_depth: tuple[int, int] = (MIN_SEARCH_DEPTH, MAX_TREE_DEPTH)
    knn_k: tuple[int, int] = (MIN_K, MAX_K)
    knn_distances: tuple[str, ...] = DISTANCES
    mlp_hidden_layers: tuple[int, int] = (1, MAX_HIDDEN_LAYERS)
    mlp_neurons: tuple[int, int] = (1, MAX_NEURONS_PER_LAYER)
    mlp_activations: tuple[str, ...] = ACTIVATIONS


def sample_hyperparams(kind: ModelKind, space: HyperparamSpace, rng) -> dict[str, Any]:
    """One uniform draw from the per-model search space."""
    def uniform_int(lo_hi):
        lo, hi = lo_hi
        return int(rng.integers(lo, hi + 1))

    if kind is ModelKind.DT:
        return {"max_depth": uniform_int(space.dt_max_depth)}
    if kind is ModelKind.RF:
        return {
            "trees": uniform_int(space.rf_trees),
            "max_depth": uniform_int(space.rf_max_depth),
        }
    if kind is ModelKind.KNN:
        return {
            "k": uniform_int(space.knn_k),
            "distance": space.knn_distances[int(rng.integers(len(space.knn_distances)))],
        }
    if kind is ModelKind.MLP:
        n_layers = uniform_int(space.mlp_hidden_layers)
        return {
            "hidden_layers": tuple(
                uniform_int(space.mlp_neurons) for _ in range(n_layers)
            ),
            "activation": space.mlp_activations[
                int(rng.integers(len(space.mlp_activations)))
            ],
        }
    raise ConfigError(f"unknown model kind {kind!r}")


def _train(kind, train, params, seed, mlp_cfg):
    if kind is ModelKind.DT:
        return train_dt(train, params["max_depth"], seed=seed)
    if kind is ModelKind.RF:
        return train_rf(train, params["trees"], params["max_depth"], seed=seed)
    if kind is ModelKind.KNN:
        return train_knn(train, params["k"], params["distance"])
    return train_mlp(
        train, params["hidden_layers"], params["activation"], cfg=mlp_cfg, seed=seed
    )


@dataclass(frozen=True)
class Candidate:
    index: int
    hyperparams: dict[str, Any]
    val_mape_pct: float | None   # None when training/scoring failed
    error: str | None = None


@dataclass(frozen=True)
class SearchResult:
    model: TrainedModel
    best: Candidate
    candidates: tuple[Candidate, ...] = field(repr=False)


def random_search(
    train: Dataset,
    kind: ModelKind,
    budget: int,
    seed: int = 0,
    val_fraction: float = 0.2,
    space: HyperparamSpace | None = None,
    mlp_cfg: MlpTrainingConfig | None = None,
) -> SearchResult:
    """Try `budget` sampled configs, keep the lowest validation MAPE.

    Validation is the chronological tail of `train`; the winner is then
    retrained on all of `train` with the same derived seed.
    """
    if budget < 1:
        raise ConfigError(f"budget must be >= 1, got {budget}")
    if not 0.0 < val_fraction < 1.0:
        raise ConfigError("val_fraction must lie strictly between 0 and 1")
    space = space or HyperparamSpace()

    sampler = np.random.default_rng(np.random.SeedSequence((int(seed), 0)))
    drawn = [sample_hyperparams(kind, space, sampler) for _ in range(budget)]

    fit, holdout = chronological_split(train, 1.0 - val_fraction)

    candidates: list[Candidate] = []
    for i, params in enumerate(drawn):
        cand_seed = int(np.random.SeedSequence((int(seed), 1 + i)).generate_state(1)[0])
        try:
            model = _train(kind, fit, params, cand_seed, mlp_cfg)
            preds = model.predict_batch(holdout.features)
            score = mape(preds, holdout.labels)
        except HrvError as err:
            log.warning("search candidate %d (%s) failed: %s", i, params, err)
            candidates.append(Candidate(i, params, None, error=str(err)))
            continue
        candidates.append(Candidate(i, params, score))

    scored = [c for c in candidates if c.val_mape_pct is not None]
    if not scored:
        raise SearchExhausted(
            f"all {budget} sampled configurations failed; last error: "
            f"{candidates[-1].error}"
        )
    best = min(scored, key=lambda c: (c.val_mape_pct, c.index))
    best_seed = int(
        np.random.SeedSequence((int(seed), 1 + best.index)).generate_state(1)[0]
    )
    final = _train(kind, train, best.hyperparams, best_seed, mlp_cfg)
    return SearchResult(model=final, best=best, candidates=tuple(candidates))
