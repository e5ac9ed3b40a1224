"""Siamese encoder with a wide&deep scoring head.

Two identical two-layer ReLU MLPs with shared weights map each
ingredient vector to a hidden representation. The head concatenates the
two representations through another two-layer MLP (the deep vector),
flattens their outer product row-major (the wide vector), and applies a
final affine layer over [wide, deep]. The output is an unbounded real
score; no squashing is applied.

Everything here is a pure function over explicit parameters: same inputs
and parameters give bit-identical outputs, and inference is safe to run
concurrently over a shared ModelParams.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO

import numpy as np

CHECKPOINT_FORMAT_VERSION = 1

PARAM_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3", "W4", "b4", "W5", "b5")


@dataclass(frozen=True)
class Hyperparams:
    input_dim: int = 64
    hidden_i: int = 64
    hidden_j: int = 64
    symmetrize: bool = False
    use_wide: bool = True

    def __post_init__(self) -> None:
        if min(self.input_dim, self.hidden_i, self.hidden_j) < 1:
            raise ValueError("all layer sizes must be positive")

    @property
    def wide_dim(self) -> int:
        return self.hidden_j * self.hidden_j

    @property
    def final_input_dim(self) -> int:
        return self.wide_dim + self.hidden_j if self.use_wide else self.hidden_j


@dataclass
class ModelParams:
    """All weights and biases. Shapes follow the layer dimension
    annotations exactly; b5 is a length-1 array for uniform treatment by
    the optimizer."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    W3: np.ndarray
    b3: np.ndarray
    W4: np.ndarray
    b4: np.ndarray
    W5: np.ndarray
    b5: np.ndarray

    def as_dict(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def copy(self) -> "ModelParams":
        return ModelParams(**{name: getattr(self, name).copy() for name in PARAM_NAMES})

    def n_parameters(self) -> int:
        return sum(getattr(self, name).size for name in PARAM_NAMES)


def expected_shapes(hp: Hyperparams) -> dict[str, tuple[int, ...]]:
    i, j, n = hp.hidden_i, hp.hidden_j, hp.input_dim
    return {
        "W1": (i, n), "b1": (i,),
        "W2": (j, i), "b2": (j,),
        "W3": (j, 2 * j), "b3": (j,),
        "W4": (j, j), "b4": (j,),
        "W5": (1, hp.final_input_dim), "b5": (1,),
    }


def validate_shapes(params: ModelParams, hp: Hyperparams) -> None:
    for name, shape in expected_shapes(hp).items():
        actual = getattr(params, name).shape
        if actual != shape:
            raise ValueError(f"{name} has shape {actual}, expected {shape}")


def init_params(hp: Hyperparams, seed: int) -> ModelParams:
    """He-style init: N(0, sqrt(2/fan_in)) weights, zero biases.

    Matrices are drawn in a fixed order so the result is fully
    determined by (hp, seed).
    """
    rng = np.random.default_rng(seed)
    shapes = expected_shapes(hp)
    arrays: dict[str, np.ndarray] = {}
    for name in PARAM_NAMES:
        shape = shapes[name]
        if name.startswith("W"):
            fan_in = shape[1]
            arrays[name] = rng.normal(0.0, math.sqrt(2.0 / fan_in), size=shape)
        else:
            arrays[name] = np.zeros(shape)
    return ModelParams(**arrays)


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def encode(params: ModelParams, x: np.ndarray) -> np.ndarray:
    """Shared-weight encoder: ReLU(W2 ReLU(W1 x + b1) + b2)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.W1.shape[1],):
        raise ValueError(f"input has shape {x.shape}, expected ({params.W1.shape[1]},)")
    return _relu(params.W2 @ _relu(params.W1 @ x + params.b1) + params.b2)


def _core_batch(params: ModelParams, hp: Hyperparams, xa: np.ndarray, xb: np.ndarray,
                want_cache: bool) -> tuple[np.ndarray, dict | None]:
    """Order-sensitive forward over a batch; rows of xa/xb are pairs."""
    p = params
    z1a = xa @ p.W1.T + p.b1
    a1a = _relu(z1a)
    z2a = a1a @ p.W2.T + p.b2
    ha = _relu(z2a)
    z1b = xb @ p.W1.T + p.b1
    a1b = _relu(z1b)
    z2b = a1b @ p.W2.T + p.b2
    hb = _relu(z2b)

    c = np.concatenate([ha, hb], axis=1)
    z3 = c @ p.W3.T + p.b3
    a3 = _relu(z3)
    z4 = a3 @ p.W4.T + p.b4
    d = _relu(z4)
    if hp.use_wide:
        j = hp.hidden_j
        wide = np.einsum("bp,bq->bpq", ha, hb).reshape(len(ha), j * j)
        u = np.concatenate([wide, d], axis=1)
    else:
        u = d
    y = u @ p.W5[0] + p.b5[0]
    if not want_cache:
        return y, None
    cache = {
        "xa": xa, "xb": xb, "z1a": z1a, "a1a": a1a, "z2a": z2a, "ha": ha,
        "z1b": z1b, "a1b": a1b, "z2b": z2b, "hb": hb,
        "c": c, "z3": z3, "a3": a3, "z4": z4, "u": u,
    }
    return y, cache


def forward_batch(params: ModelParams, hp: Hyperparams,
                  xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
    """Scores for a batch of pairs; (B, input_dim) inputs, (B,) output."""
    xa = np.asarray(xa, dtype=np.float64)
    xb = np.asarray(xb, dtype=np.float64)
    if xa.ndim != 2 or xa.shape != xb.shape or xa.shape[1] != hp.input_dim:
        raise ValueError(
            f"expected two (B, {hp.input_dim}) arrays, got {xa.shape} and {xb.shape}"
        )
    validate_shapes(params, hp)
    y, _ = _core_batch(params, hp, xa, xb, want_cache=False)
    if hp.symmetrize:
        y2, _ = _core_batch(params, hp, xb, xa, want_cache=False)
        y = 0.5 * (y + y2)
    return y


def forward(params: ModelParams, hp: Hyperparams, xa: np.ndarray, xb: np.ndarray) -> float:
    """Pairing score for a single (xa, xb) pair."""
    xa = np.asarray(xa, dtype=np.float64)
    xb = np.asarray(xb, dtype=np.float64)
    if xa.shape != (hp.input_dim,) or xb.shape != (hp.input_dim,):
        raise ValueError(f"inputs must have shape ({hp.input_dim},)")
    return float(forward_batch(params, hp, xa[None, :], xb[None, :])[0])


def save_checkpoint(params: ModelParams, hp: Hyperparams, sink: IO[str]) -> None:
    """JSON checkpoint: hyperparameters plus every tensor as nested
    arrays at full (shortest round-trip) precision."""
    obj = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "hyperparams": {
            "input_dim": hp.input_dim,
            "hidden_i": hp.hidden_i,
            "hidden_j": hp.hidden_j,
            "symmetrize": hp.symmetrize,
            "use_wide": hp.use_wide,
        },
        "params": {name: getattr(params, name).tolist() for name in PARAM_NAMES},
    }
    json.dump(obj, sink)
    sink.write("\n")


def load_checkpoint(source: IO[str]) -> tuple[ModelParams, Hyperparams]:
    obj = json.load(source)
    version = obj.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint format_version: {version!r}")
    hp = Hyperparams(**obj["hyperparams"])
    arrays = {name: np.array(obj["params"][name], dtype=np.float64) for name in PARAM_NAMES}
    params = ModelParams(**arrays)
    validate_shapes(params, hp)
    return params, hp
