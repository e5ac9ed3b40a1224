"""Regression and ranking metrics for pairing-score predictors.

A predictor is any callable mapping parallel token sequences to a score
array; factories below wrap a trained model and the cosine-similarity
baseline in that shape so the evaluation path is identical for both.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Callable, Sequence

import numpy as np

from .embedding import EmbeddingTable, cosine
from .model import Hyperparams, ModelParams, forward_batch
from .pairscore import PairStats

Predictor = Callable[[Sequence[str], Sequence[str]], np.ndarray]

DEFAULT_NDCG_KS = (10, 20, 50, 100, 500, 1000)


def regression_metrics(predictions: Sequence[float],
                       targets: Sequence[float]) -> dict[str, float]:
    """rmse, mse, mae, corr and r2 of predictions against targets.

    corr is the Pearson coefficient; a constant predictor gets corr 0.0
    (uncorrelated, not undefined, so baselines still produce reports).
    r2 is 1 - SS_res/SS_tot with SS_tot about the target mean; it goes
    negative when predicting the mean would have been better.
    """
    p = np.asarray(predictions, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if p.shape != t.shape or p.ndim != 1:
        raise ValueError("predictions and targets must be equal-length 1-d sequences")
    if len(p) < 2:
        raise ValueError("need at least 2 examples")
    tc = t - t.mean()
    ss_tot = float(np.sum(tc ** 2))
    if ss_tot == 0.0:
        raise ValueError("targets are all identical: corr and r2 are undefined")

    err = p - t
    mse = float(np.mean(err ** 2))
    rmse = float(np.sqrt(mse))
    mae = float(np.mean(np.abs(err)))
    pc = p - p.mean()
    denom = float(np.sqrt(np.sum(pc ** 2) * ss_tot))
    corr = float(np.sum(pc * tc) / denom) if denom > 0 else 0.0
    r2 = 1.0 - float(np.sum(err ** 2)) / ss_tot
    return {"rmse": rmse, "mse": mse, "mae": mae, "corr": corr, "r2": r2}


def ndcg_at_k(ranked_true_scores: Sequence[float],
              ideal_true_scores: Sequence[float], k: int) -> float:
    """NDCG at cutoff k of true scores listed in predicted-rank order.

    Gain of an item is max(true_score, 0) so negative pairing scores
    contribute nothing; rank r is discounted by log2(r + 1). The two
    sequences must be permutations of one multiset. When the ideal top-k
    gain is zero there is nothing to rank and the score is 1.0.
    """
    s = np.asarray(ranked_true_scores, dtype=np.float64)
    ideal = np.asarray(ideal_true_scores, dtype=np.float64)
    if s.ndim != 1 or s.shape != ideal.shape or len(s) == 0:
        raise ValueError("score sequences must be equal-length nonempty 1-d sequences")
    if not np.array_equal(np.sort(s), np.sort(ideal)):
        raise ValueError("ranked and ideal scores are not the same multiset")
    if k < 1:
        raise ValueError("k must be >= 1")
    top = min(k, len(s))
    discounts = 1.0 / np.log2(np.arange(2, top + 2))
    dcg = float(np.sum(np.maximum(s[:top], 0.0) * discounts))
    ideal_desc = np.sort(np.maximum(ideal, 0.0))[::-1]
    idcg = float(np.sum(ideal_desc[:top] * discounts))
    if idcg == 0.0:
        return 1.0
    return dcg / idcg


def roc_auc(predictions: Sequence[float], labels: Sequence[int]) -> float:
    """Mann-Whitney AUC: fraction of (positive, negative) prediction pairs
    correctly ordered, ties counting half. Average ranks, O(n log n)."""
    s = np.asarray(predictions, dtype=np.float64)
    y = np.asarray(labels)
    if y.shape != s.shape or y.ndim != 1 or len(y) == 0:
        raise ValueError("predictions and labels must be equal-length nonempty 1-d sequences")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_auc needs at least one positive and one negative label")
    order = np.argsort(s, kind="stable")
    ranks = np.empty(len(s), dtype=np.float64)
    sorted_scores = s[order]
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i: j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    rank_sum_pos = float(ranks[y == 1].sum())
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def cosine_baseline(embeddings: EmbeddingTable,
                    pairs: Sequence[tuple[str, str]]) -> np.ndarray:
    """Per-pair cosine of the two ingredient vectors, used directly as
    the score prediction."""
    return np.array([cosine(embeddings[a], embeddings[b]) for a, b in pairs],
                    dtype=np.float64)


@dataclass
class MetricsReport:
    n_examples: int
    rmse: float
    mse: float
    mae: float
    corr: float
    r2: float
    roc_auc: float
    ndcg_at: dict[int, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n_examples": self.n_examples,
            "rmse": self.rmse,
            "mse": self.mse,
            "mae": self.mae,
            "corr": self.corr,
            "r2": self.r2,
            "roc_auc": self.roc_auc,
            "ndcg_at": {str(k): v for k, v in sorted(self.ndcg_at.items())},
        }


def evaluate(predictor: Predictor, pairs: Sequence[PairStats],
             threshold: float, ks: Sequence[int] = DEFAULT_NDCG_KS) -> MetricsReport:
    """Full metric suite of a predictor on labelled pairs.

    ROC labels a pair positive when its true score is at or above
    ``threshold`` (the complementary-pair cut); a split that is
    single-class at that threshold propagates roc_auc's error. NDCG
    ranks by predicted score, ties broken by pair key for stability.
    """
    if len(pairs) == 0:
        raise ValueError("cannot evaluate on zero pairs")
    predicted = np.asarray(predictor([p.a for p in pairs], [p.b for p in pairs]),
                           dtype=np.float64)
    truth = np.array([p.score for p in pairs], dtype=np.float64)
    base = regression_metrics(predicted, truth)
    auc = roc_auc(predicted, (truth >= threshold).astype(int))
    order = sorted(range(len(pairs)), key=lambda i: (-predicted[i], pairs[i].key))
    ranked_true = truth[order]
    ndcg_at = {int(k): ndcg_at_k(ranked_true, ranked_true, int(k)) for k in ks}
    return MetricsReport(n_examples=len(pairs), roc_auc=auc, ndcg_at=ndcg_at, **base)


def model_predictor(params: ModelParams, hp: Hyperparams,
                    embeddings: EmbeddingTable) -> Predictor:
    def predict(tokens_a: Sequence[str], tokens_b: Sequence[str]) -> np.ndarray:
        xa = np.stack([embeddings[t] for t in tokens_a])
        xb = np.stack([embeddings[t] for t in tokens_b])
        return forward_batch(params, hp, xa, xb)
    return predict


def cosine_predictor(embeddings: EmbeddingTable) -> Predictor:
    def predict(tokens_a: Sequence[str], tokens_b: Sequence[str]) -> np.ndarray:
        return cosine_baseline(embeddings, list(zip(tokens_a, tokens_b)))
    return predict


def write_report(report: MetricsReport, sink: IO[str]) -> None:
    json.dump(report.as_dict(), sink, indent=2, sort_keys=True)
    sink.write("\n")


def report_csv_row(name: str, report: MetricsReport) -> str:
    """One comparison-table row; pair with REPORT_CSV_HEADER."""
    cells = [name, repr(report.rmse), repr(report.mse), repr(report.mae),
             repr(report.corr), repr(report.r2), repr(report.roc_auc)]
    cells += [repr(report.ndcg_at[k]) for k in sorted(report.ndcg_at)]
    return ",".join(cells)


def report_csv_header(ks: Sequence[int] = DEFAULT_NDCG_KS) -> str:
    return ",".join(["predictor", "rmse", "mse", "mae", "corr", "r2", "roc_auc"]
                    + [f"ndcg@{k}" for k in sorted(ks)])
