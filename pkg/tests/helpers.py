"""Shared test machinery: finite-difference gradient checking.

Samples are rejection-drawn until every ReLU pre-activation sits at least
1e-3 from its kink, so the central-difference interval (step 1e-5) never
crosses a non-smooth point and the kink-exclusion set is empty by
construction.
"""

from __future__ import annotations

import numpy as np
import pytest

from pairkit.model import (
    Hyperparams,
    ModelParams,
    PARAM_NAMES,
    forward_batch,
    init_params,
)
from pairkit.train import gradients

KINK_FLOOR = 1e-3


def preactivation_floor(params: ModelParams, hp: Hyperparams,
                        xa: np.ndarray, xb: np.ndarray) -> float:
    """Smallest |pre-activation| across the whole forward pass, recomputed
    independently of the model module."""
    mags: list[float] = []

    def encoder(x):
        z1 = x @ params.W1.T + params.b1
        a1 = np.maximum(z1, 0.0)
        z2 = a1 @ params.W2.T + params.b2
        mags.append(float(np.abs(z1).min()))
        mags.append(float(np.abs(z2).min()))
        return np.maximum(z2, 0.0)

    def head(ha, hb):
        c = np.concatenate([ha, hb], axis=1)
        z3 = c @ params.W3.T + params.b3
        a3 = np.maximum(z3, 0.0)
        z4 = a3 @ params.W4.T + params.b4
        mags.append(float(np.abs(z3).min()))
        mags.append(float(np.abs(z4).min()))

    orders = [(xa, xb)] + ([(xb, xa)] if hp.symmetrize else [])
    for u, v in orders:
        head(encoder(u), encoder(v))
    return min(mags)


def batch_loss(params: ModelParams, hp: Hyperparams,
               xa: np.ndarray, xb: np.ndarray, y: np.ndarray) -> float:
    pred = forward_batch(params, hp, xa, xb)
    return float(np.mean((pred - y) ** 2))


def run_fd_check(hp: Hyperparams, batch_size: int, seed: int,
                 h: float = 1e-5, tol: float = 1e-4) -> float:
    """Central-difference check of every gradient coordinate; returns the
    worst relative error and asserts it is below ``tol``."""
    rng = np.random.default_rng(seed)
    for _ in range(200):
        params = init_params(hp, seed=int(rng.integers(1_000_000)))
        xa = rng.normal(size=(batch_size, hp.input_dim))
        xb = rng.normal(size=(batch_size, hp.input_dim))
        y = rng.normal(size=batch_size)
        if preactivation_floor(params, hp, xa, xb) > KINK_FLOOR:
            break
    else:
        pytest.fail("no kink-safe sample found")

    grads = gradients(params, hp, list(zip(xa, xb, y)))
    worst = 0.0
    for name in PARAM_NAMES:
        arr = getattr(params, name)
        g = grads[name]
        assert g.shape == arr.shape
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = float(arr[idx])
            arr[idx] = orig + h
            lp = batch_loss(params, hp, xa, xb, y)
            arr[idx] = orig - h
            lm = batch_loss(params, hp, xa, xb, y)
            arr[idx] = orig
            fd = (lp - lm) / (2.0 * h)
            rel = abs(float(g[idx]) - fd) / max(abs(float(g[idx])), abs(fd), 1e-10)
            worst = max(worst, rel)
    assert worst < tol, f"worst relative gradient error {worst:.3e}"
    return worst
