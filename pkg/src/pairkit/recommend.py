"""Ranked pairing recommendations on top of a trained model.

The candidate pool is the embedding vocabulary in sorted order, so the
library, CLI and HTTP service agree on membership and on tie order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Sequence

from .embedding import EmbeddingTable
from .model import Hyperparams, ModelParams, forward_batch
from .pairscore import ScoreDataset

VALID_FILTERS = ("all", "known_only", "unknown_only")


class UnknownIngredientError(ValueError):
    """Raised when a query token is outside the scoring vocabulary."""

    def __init__(self, token: str, suggestions: Sequence[str]):
        self.token = token
        self.suggestions = list(suggestions)
        detail = f"unknown ingredient {token!r}"
        if self.suggestions:
            detail += f" (did you mean: {', '.join(self.suggestions)})"
        super().__init__(detail)


def suggest(token: str, vocabulary: Sequence[str], limit: int = 5) -> list[str]:
    """Prefix matches on the sorted vocabulary, capped at ``limit``."""
    return [v for v in vocabulary if v.startswith(token)][:limit]


@dataclass(frozen=True)
class PairingAnswer:
    ingredient: str
    partner: str
    predicted_score: float
    status: str                    # "known" or "unknown"
    true_score: float | None       # corpus score when known
    cooccurrence: int | None


@dataclass
class Recommender:
    params: ModelParams
    hp: Hyperparams
    embeddings: EmbeddingTable
    dataset: ScoreDataset

    def __post_init__(self) -> None:
        self._vocab = sorted(self.embeddings.vectors.keys())

    def vocabulary(self) -> list[str]:
        return list(self._vocab)

    def require_token(self, token: str) -> None:
        if token not in self.embeddings:
            raise UnknownIngredientError(token, suggest(token, self._vocab))

    def _answer(self, a: str, b: str, predicted: float) -> PairingAnswer:
        known = self.dataset.lookup(a, b)
        if known is not None:
            return PairingAnswer(a, b, predicted, "known", known.score, known.cooc)
        return PairingAnswer(a, b, predicted, "unknown", None, None)

    def _score_one(self, a: str, b: str) -> float:
        # every public operation funnels through this batch-of-1 forward;
        # larger batches hit different BLAS kernels whose last-ulp sums
        # differ, which would break cross-interface bit-equality
        xa = self.embeddings[a][None, :]
        xb = self.embeddings[b][None, :]
        return float(forward_batch(self.params, self.hp, xa, xb)[0])

    def score_pair(self, a: str, b: str) -> PairingAnswer:
        self.require_token(a)
        self.require_token(b)
        return self._answer(a, b, self._score_one(a, b))

    def rank_partners(self, token: str, limit: int = 20,
                      pair_filter: str = "all") -> list[PairingAnswer]:
        """Top partners for one ingredient, best predicted score first.

        ``pair_filter`` restricts candidates: known_only keeps pairs seen
        in the corpus, unknown_only keeps unseen ones. Ties break on the
        partner token so rankings are stable across runs.
        """
        self.require_token(token)
        if pair_filter not in VALID_FILTERS:
            raise ValueError(f"pair_filter must be one of {VALID_FILTERS}")
        if limit < 1:
            raise ValueError("limit must be >= 1")
        partners = [v for v in self._vocab if v != token]
        if pair_filter != "all":
            want_known = pair_filter == "known_only"
            partners = [v for v in partners
                        if (self.dataset.lookup(token, v) is not None) == want_known]
        scores = [self._score_one(token, v) for v in partners]
        order = sorted(range(len(partners)),
                       key=lambda i: (-scores[i], partners[i]))
        return [self._answer(token, partners[i], scores[i])
                for i in order[:limit]]

    def compare_targets(self, token: str,
                        targets: Sequence[str]) -> list[PairingAnswer]:
        """Scores of one ingredient against an explicit target list,
        in the order given (no re-sorting)."""
        self.require_token(token)
        for t in targets:
            self.require_token(t)
        return [self._answer(token, t, self._score_one(token, t))
                for t in targets]


RANKING_HEADER = ("rank", "partner", "predicted_score", "status",
                  "true_score", "cooccurrence")


def write_ranking(answers: Sequence[PairingAnswer], sink: IO[str]) -> None:
    """Ranking CSV; float repr keeps full precision for downstream diffing."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(RANKING_HEADER)
    for rank, ans in enumerate(answers, start=1):
        writer.writerow([
            rank,
            ans.partner,
            repr(ans.predicted_score),
            ans.status,
            "" if ans.true_score is None else repr(ans.true_score),
            "" if ans.cooccurrence is None else ans.cooccurrence,
        ])
