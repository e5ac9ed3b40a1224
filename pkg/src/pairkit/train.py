"""MSE training with exact backpropagated gradients and Adam.

Gradients are derived by hand for the full wide&deep architecture
(including the outer-product wide path and the shared Siamese encoder,
whose two branches accumulate into one gradient). The ReLU subgradient
at exactly 0 is taken as 0. The loop is single-threaded, owns its state,
and is bit-reproducible given the config seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .embedding import EmbeddingTable
from .model import (
    Hyperparams,
    ModelParams,
    PARAM_NAMES,
    _core_batch,
    forward_batch,
    init_params,
    validate_shapes,
)
from .pairscore import ScoreDataset


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 512
    max_epochs: int = 200
    patience: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ValueError("beta1 and beta2 must be in (0, 1)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValueError("batch_size, max_epochs and patience must be >= 1")


@dataclass
class TrainState:
    params: ModelParams
    adam_m: dict[str, np.ndarray]
    adam_v: dict[str, np.ndarray]
    step: int = 0
    best_val_rmse: float = math.inf
    epochs_since_best: int = 0


def init_state(params: ModelParams) -> TrainState:
    zeros = lambda: {n: np.zeros_like(getattr(params, n)) for n in PARAM_NAMES}
    return TrainState(params=params, adam_m=zeros(), adam_v=zeros())


def mse_loss(predictions: Sequence[float], targets: Sequence[float]) -> float:
    p = np.asarray(predictions, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if p.shape != t.shape or p.ndim != 1 or len(p) == 0:
        raise ValueError("predictions and targets must be equal-length nonempty sequences")
    return float(np.mean((p - t) ** 2))


def _backward(params: ModelParams, hp: Hyperparams, cache: dict,
              dy: np.ndarray) -> dict[str, np.ndarray]:
    """Gradients of sum(dy * y) through one order-sensitive forward pass."""
    p = params
    j = hp.hidden_j
    grads: dict[str, np.ndarray] = {}

    grads["W5"] = (dy @ cache["u"])[None, :]
    grads["b5"] = np.array([dy.sum()])
    du = np.outer(dy, p.W5[0])
    if hp.use_wide:
        d_wide = du[:, : j * j]
        dd = du[:, j * j:]
    else:
        d_wide = None
        dd = du

    dz4 = dd * (cache["z4"] > 0)
    grads["W4"] = dz4.T @ cache["a3"]
    grads["b4"] = dz4.sum(axis=0)
    da3 = dz4 @ p.W4
    dz3 = da3 * (cache["z3"] > 0)
    grads["W3"] = dz3.T @ cache["c"]
    grads["b3"] = dz3.sum(axis=0)
    dc = dz3 @ p.W3
    dha = dc[:, :j].copy()
    dhb = dc[:, j:].copy()
    if d_wide is not None:
        dw = d_wide.reshape(-1, j, j)
        dha += np.einsum("bpq,bq->bp", dw, cache["hb"])
        dhb += np.einsum("bpq,bp->bq", dw, cache["ha"])

    # Siamese weight sharing: both branches accumulate into one encoder gradient.
    grads["W2"] = np.zeros_like(p.W2)
    grads["b2"] = np.zeros_like(p.b2)
    grads["W1"] = np.zeros_like(p.W1)
    grads["b1"] = np.zeros_like(p.b1)
    for dh, z2, a1, z1, x in (
        (dha, cache["z2a"], cache["a1a"], cache["z1a"], cache["xa"]),
        (dhb, cache["z2b"], cache["a1b"], cache["z1b"], cache["xb"]),
    ):
        dz2 = dh * (z2 > 0)
        grads["W2"] += dz2.T @ a1
        grads["b2"] += dz2.sum(axis=0)
        da1 = dz2 @ p.W2
        dz1 = da1 * (z1 > 0)
        grads["W1"] += dz1.T @ x
        grads["b1"] += dz1.sum(axis=0)
    return grads


def _gradients_arrays(params: ModelParams, hp: Hyperparams, xa: np.ndarray,
                      xb: np.ndarray, y: np.ndarray) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """Exact MSE gradient over a stacked batch; also returns predictions."""
    n = len(y)
    if hp.symmetrize:
        y1, cache1 = _core_batch(params, hp, xa, xb, want_cache=True)
        y2, cache2 = _core_batch(params, hp, xb, xa, want_cache=True)
        pred = 0.5 * (y1 + y2)
        dpred = 2.0 * (pred - y) / n
        g1 = _backward(params, hp, cache1, 0.5 * dpred)
        g2 = _backward(params, hp, cache2, 0.5 * dpred)
        grads = {name: g1[name] + g2[name] for name in PARAM_NAMES}
    else:
        pred, cache = _core_batch(params, hp, xa, xb, want_cache=True)
        dpred = 2.0 * (pred - y) / n
        grads = _backward(params, hp, cache, dpred)
    return grads, pred


def gradients(params: ModelParams, hp: Hyperparams,
              batch: Sequence[tuple[np.ndarray, np.ndarray, float]]) -> dict[str, np.ndarray]:
    """Gradient of the batch-mean squared error w.r.t. every parameter."""
    if len(batch) == 0:
        raise ValueError("batch must be nonempty")
    validate_shapes(params, hp)
    xa = np.stack([np.asarray(e[0], dtype=np.float64) for e in batch])
    xb = np.stack([np.asarray(e[1], dtype=np.float64) for e in batch])
    y = np.array([e[2] for e in batch], dtype=np.float64)
    if xa.shape[1] != hp.input_dim:
        raise ValueError(f"batch inputs must have length {hp.input_dim}")
    grads, _ = _gradients_arrays(params, hp, xa, xb, y)
    return grads


def adam_step(state: TrainState, grads: dict[str, np.ndarray],
              config: TrainConfig) -> TrainState:
    """One bias-corrected Adam update; returns a fresh TrainState.

    Aborts loudly on any non-finite gradient component.
    """
    for name in PARAM_NAMES:
        if not np.all(np.isfinite(grads[name])):
            raise ValueError(f"non-finite gradient in {name}; training aborted")
    t = state.step + 1
    b1, b2 = config.beta1, config.beta2
    new_params: dict[str, np.ndarray] = {}
    new_m: dict[str, np.ndarray] = {}
    new_v: dict[str, np.ndarray] = {}
    for name in PARAM_NAMES:
        g = grads[name]
        m = b1 * state.adam_m[name] + (1.0 - b1) * g
        v = b2 * state.adam_v[name] + (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        theta = getattr(state.params, name) - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
        new_params[name] = theta
        new_m[name] = m
        new_v[name] = v
    return TrainState(
        params=ModelParams(**new_params),
        adam_m=new_m,
        adam_v=new_v,
        step=t,
        best_val_rmse=state.best_val_rmse,
        epochs_since_best=state.epochs_since_best,
    )


def stack_split(dataset: ScoreDataset, embeddings: EmbeddingTable,
                split_name: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Embedding arrays (xa, xb, y) for one split, pairs in canonical order."""
    pairs = dataset.pairs_for(split_name)
    xa = np.stack([embeddings[p.a] for p in pairs]) if pairs else np.zeros((0, embeddings.dim))
    xb = np.stack([embeddings[p.b] for p in pairs]) if pairs else np.zeros((0, embeddings.dim))
    y = np.array([p.score for p in pairs], dtype=np.float64)
    return xa, xb, y


@dataclass
class EpochLog:
    epoch: int
    train_mse: float
    val_rmse: float
    elapsed_seconds: float


@dataclass
class TrainResult:
    params: ModelParams          # best-validation parameters
    last_params: ModelParams
    log: list[EpochLog] = field(default_factory=list)
    best_epoch: int = 0
    best_val_rmse: float = math.inf


def train_loop(dataset: ScoreDataset, embeddings: EmbeddingTable,
               hp: Hyperparams, config: TrainConfig,
               val_split: str = "val") -> TrainResult:
    """Minibatch Adam on the train split with early stopping on
    validation RMSE.

    Keeps the parameters of the best validation epoch; stops after
    ``patience`` epochs without improvement or at ``max_epochs``.
    ``val_split`` can point elsewhere, e.g. at "train" itself for
    capacity checks that deliberately overfit.
    """
    missing = [t for t in dataset.tokens() if t not in embeddings]
    if missing:
        raise ValueError(f"missing embeddings for dataset tokens: {', '.join(missing)}")
    xa_tr, xb_tr, y_tr = stack_split(dataset, embeddings, "train")
    xa_val, xb_val, y_val = stack_split(dataset, embeddings, val_split)
    if len(y_tr) == 0 or len(y_val) == 0:
        raise ValueError("train and val splits must be nonempty")

    rng = np.random.default_rng(config.seed)
    state = init_state(init_params(hp, config.seed))
    best_params = state.params.copy()
    best_epoch = 0
    result_log: list[EpochLog] = []
    start = time.monotonic()
    n = len(y_tr)

    for epoch in range(1, config.max_epochs + 1):
        perm = rng.permutation(n)
        sq_err_sum = 0.0
        for lo in range(0, n, config.batch_size):
            idx = perm[lo: lo + config.batch_size]
            grads, preds = _gradients_arrays(
                state.params, hp, xa_tr[idx], xb_tr[idx], y_tr[idx])
            sq_err_sum += float(np.sum((preds - y_tr[idx]) ** 2))
            state = adam_step(state, grads, config)
        train_mse = sq_err_sum / n

        val_pred = forward_batch(state.params, hp, xa_val, xb_val)
        val_rmse = float(np.sqrt(np.mean((val_pred - y_val) ** 2)))
        result_log.append(EpochLog(epoch, train_mse, val_rmse, time.monotonic() - start))

        if val_rmse < state.best_val_rmse:
            state.best_val_rmse = val_rmse
            state.epochs_since_best = 0
            best_params = state.params.copy()
            best_epoch = epoch
        else:
            state.epochs_since_best += 1
            if state.epochs_since_best >= config.patience:
                break

    return TrainResult(params=best_params, last_params=state.params,
                       log=result_log, best_epoch=best_epoch,
                       best_val_rmse=state.best_val_rmse)


TRAIN_LOG_HEADER = "epoch,train_mse,val_rmse,elapsed_seconds"


def write_training_log(log: Iterable[EpochLog], sink: IO[str]) -> None:
    sink.write(TRAIN_LOG_HEADER + "\n")
    for e in log:
        sink.write(f"{e.epoch},{e.train_mse!r},{e.val_rmse!r},{e.elapsed_seconds:.3f}\n")
