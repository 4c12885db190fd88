"""Fully-connected regressor trained with mini-batch gradient descent.

Features and labels are z-normalised with statistics from the training
split only; predictions are de-normalised on the way out.  Training runs
in float64, the kept weights are quantised to float32 once at the end so
the serialised model predicts bit-identically.

init_params / forward / loss_and_grads are module functions so tests can
drive them directly (finite-difference gradient checks, zero-weight
forward-pass identities).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DivergedLoss, EmptyDataset
from .base import ModelKind, TrainMeta, TrainedModel
from .knn import standardize_stats

RELU = "relu"
TANH = "tanh"
ACTIVATIONS = (RELU, TANH)

MAX_HIDDEN_LAYERS = 5
MAX_NEURONS_PER_LAYER = 100


@dataclass(frozen=True)
class MlpTrainingConfig:
    batch_size: int = 32
    learning_rate: float = 1e-3
    max_epochs: int = 500
    patience: int = 20        # epochs without val improvement before stopping
    val_fraction: float = 0.1  # chronological tail of train used for early stop

    def __post_init__(self):
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ConfigError("batch_size, max_epochs and patience must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ConfigError("val_fraction must lie in [0, 1)")


def init_params(layer_sizes, rng) -> list[tuple[np.ndarray, np.ndarray]]:
    """Glorot-uniform weights, zero biases; layer_sizes includes in/out."""
    params = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        W = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        params.append((W, np.zeros(fan_out, dtype=np.float64)))
    return params


def _act(z: np.ndarray, activation: str) -> np.ndarray:
    return np.maximum(z, 0.0) if activation == RELU else np.tanh(z)


def forward(params, X: np.ndarray, activation: str) -> np.ndarray:
    """Network output (linear last layer), shape (m,)."""
    a = X
    for W, b in params[:-1]:
        a = _act(a @ W + b, activation)
    W, b = params[-1]
    return (a @ W + b)[:, 0]


def loss_and_grads(params, X: np.ndarray, y: np.ndarray, activation: str):
    """MSE loss over the batch plus its gradients, matching params' layout."""
    acts = [X]
    zs = []
    a = X
    for W, b in params[:-1]:
        z = a @ W + b
        zs.append(z)
        a = _act(z, activation)
        acts.append(a)
    W_out, b_out = params[-1]
    yhat = (a @ W_out + b_out)[:, 0]
    resid = yhat - y
    m = y.size
    loss = float(np.mean(resid * resid))

    grads = [None] * len(params)
    delta = (2.0 / m) * resid[:, None]          # dL/d(output pre-activation)
    grads[-1] = (acts[-1].T @ delta, delta.sum(axis=0))
    up = delta @ W_out.T
    for i in range(len(params) - 2, -1, -1):
        if activation == RELU:
            dz = up * (zs[i] > 0.0)
        else:
            t = np.tanh(zs[i])
            dz = up * (1.0 - t * t)
        grads[i] = (acts[i].T @ dz, dz.sum(axis=0))
        if i:
            up = dz @ params[i][0].T
    return loss, grads


class MlpRegressor(TrainedModel):
    kind = ModelKind.MLP

    def __init__(
        self,
        params32: list[tuple[np.ndarray, np.ndarray]],  # float32 W, b
        activation: str,
        x_mu: np.ndarray,     # float32
        x_sigma: np.ndarray,  # float32
        y_mu: float,
        y_sigma: float,
        meta: TrainMeta,
    ):
        super().__init__(meta)
        self.params32 = params32
        self.activation = activation
        self.x_mu = x_mu
        self.x_sigma = x_sigma
        self.y_mu = float(y_mu)
        self.y_sigma = float(y_sigma)
        self._params64 = [
            (W.astype(np.float64), b.astype(np.float64)) for W, b in params32
        ]
        self._x_mu64 = x_mu.astype(np.float64)
        self._x_sigma64 = x_sigma.astype(np.float64)

    @property
    def hidden_layers(self) -> tuple[int, ...]:
        return tuple(W.shape[1] for W, _ in self.params32[:-1])

    def _predict_batch(self, X: np.ndarray) -> np.ndarray:
        Xs = (X - self._x_mu64) / self._x_sigma64
        out = forward(self._params64, Xs, self.activation)
        return out * self.y_sigma + self.y_mu


def train_mlp(
    train,
    hidden_layers,
    activation: str,
    cfg: MlpTrainingConfig | None = None,
    seed: int = 0,
) -> MlpRegressor:
    cfg = cfg or MlpTrainingConfig()
    hidden = tuple(int(h) for h in hidden_layers)
    if not 1 <= len(hidden) <= MAX_HIDDEN_LAYERS:
        raise ConfigError(f"need 1..{MAX_HIDDEN_LAYERS} hidden layers, got {len(hidden)}")
    if any(not 1 <= h <= MAX_NEURONS_PER_LAYER for h in hidden):
        raise ConfigError(f"hidden widths must lie in [1, {MAX_NEURONS_PER_LAYER}]")
    if activation not in ACTIVATIONS:
        raise ConfigError(f"activation must be one of {ACTIVATIONS}, got {activation!r}")
    if len(train) == 0:
        raise EmptyDataset("cannot train an MLP on an empty dataset")

    X64 = train.features
    y64 = train.labels
    x_mu, x_sigma = standardize_stats(X64)
    y_mu = float(y64.mean())
    y_sigma = float(y64.std())
    if y_sigma == 0.0:
        y_sigma = 1.0
    Xs = (X64 - x_mu) / x_sigma
    ys = (y64 - y_mu) / y_sigma

    m = ys.size
    n_val = int(np.floor(cfg.val_fraction * m))
    if n_val >= 1:
        X_tr, y_tr = Xs[: m - n_val], ys[: m - n_val]
        X_val, y_val = Xs[m - n_val :], ys[m - n_val :]
    else:
        X_tr, y_tr = Xs, ys          # too small to hold anything out
        X_val, y_val = Xs, ys

    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0)))
    layer_sizes = (X64.shape[1],) + hidden + (1,)
    params = init_params(layer_sizes, rng)

    best = [(W.copy(), b.copy()) for W, b in params]
    best_val = np.inf
    stall = 0
    for epoch in range(cfg.max_epochs):
        order = rng.permutation(y_tr.size)
        for lo in range(0, y_tr.size, cfg.batch_size):
            batch = order[lo : lo + cfg.batch_size]
            loss, grads = loss_and_grads(params, X_tr[batch], y_tr[batch], activation)
            if not np.isfinite(loss):
                raise DivergedLoss(
                    f"non-finite batch loss at epoch {epoch} (lr={cfg.learning_rate})"
                )
            params = [
                (W - cfg.learning_rate * dW, b - cfg.learning_rate * db)
                for (W, b), (dW, db) in zip(params, grads)
            ]
        val_pred = forward(params, X_val, activation)
        val_loss = float(np.mean((val_pred - y_val) ** 2))
        if not np.isfinite(val_loss):
            raise DivergedLoss(f"non-finite validation loss at epoch {epoch}")
        if val_loss < best_val - 1e-12:
            best_val = val_loss
            best = [(W.copy(), b.copy()) for W, b in params]
            stall = 0
        else:
            stall += 1
            if stall >= cfg.patience:
                break

    params32 = [(W.astype(np.float32), b.astype(np.float32)) for W, b in best]
    meta = TrainMeta(
        hyperparams={
            "hidden_layers": hidden,
            "activation": activation,
            "batch_size": cfg.batch_size,
            "learning_rate": cfg.learning_rate,
            "max_epochs": cfg.max_epochs,
            "patience": cfg.patience,
        },
        seed=int(seed),
        n_features=X64.shape[1],
    )
    return MlpRegressor(
        params32,
        activation,
        x_mu.astype(np.float32),
        x_sigma.astype(np.float32),
        y_mu,
        y_sigma,
        meta,
    )
