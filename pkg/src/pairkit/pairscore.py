"""PMI/NPMI pairing scores and the known-pairs dataset.

A pair's score is its normalized pointwise mutual information over the
recipe corpus: npmi = pmi / h with pmi = log(p(a,b) / (p(a) p(b))) and
h = -log p(a,b). Scores live in [-1, 1]: 0 at independence, +1 at
complete co-occurrence. Pairs that never co-occur are never scored; they
are the unknown set the model predicts. Logs are natural internally
(npmi is base-invariant).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .corpus import CountTable, pair_key

DEFAULT_RATIOS = (0.8, 0.1, 0.1)
SPLIT_NAMES = ("train", "val", "test")

COMPLEMENTARY = "complementary"
NON_COMPLEMENTARY = "non_complementary"


def _check_counts(cooc: int, occ_a: int, occ_b: int, n_recipes: int) -> None:
    if cooc < 1:
        raise ValueError("zero co-occurrence pairs are never scored")
    if occ_a < 1 or occ_b < 1 or n_recipes < 1:
        raise ValueError("all counts must be >= 1")
    if cooc > min(occ_a, occ_b):
        raise ValueError("co-occurrence cannot exceed either occurrence count")
    if occ_a > n_recipes or occ_b > n_recipes:
        raise ValueError("occurrence cannot exceed the recipe count")


def pmi(cooc: int, occ_a: int, occ_b: int, n_recipes: int) -> float:
    """Pointwise mutual information, natural log.

    Computed as log(cooc * n / (occ_a * occ_b)); the integer products are
    exact, so the independence construction cooc*n == occ_a*occ_b gives
    exactly 0.
    """
    _check_counts(cooc, occ_a, occ_b, n_recipes)
    cooc, occ_a, occ_b, n_recipes = int(cooc), int(occ_a), int(occ_b), int(n_recipes)
    return math.log((cooc * n_recipes) / (occ_a * occ_b))


def npmi(cooc: int, occ_a: int, occ_b: int, n_recipes: int) -> float:
    """NPMI in [-1, 1]; +1 for complete co-occurrence.

    Complete co-occurrence (cooc == occ_a == occ_b, where pmi == h) and
    the h == 0 limit (the pair is in every recipe) both return exactly
    1.0; everything else is clamped against floating-point overshoot.
    """
    _check_counts(cooc, occ_a, occ_b, n_recipes)
    cooc, occ_a, occ_b, n_recipes = int(cooc), int(occ_a), int(occ_b), int(n_recipes)
    if cooc == occ_a == occ_b:
        return 1.0
    h = -math.log(cooc / n_recipes)
    val = math.log((cooc * n_recipes) / (occ_a * occ_b)) / h
    return min(1.0, max(-1.0, val))


def classify_pair(score: float, threshold: float) -> str:
    """Complementary iff score >= threshold (threshold inclusive)."""
    return COMPLEMENTARY if score >= threshold else NON_COMPLEMENTARY


@dataclass(frozen=True)
class PairStats:
    a: str
    b: str
    occ_a: int
    occ_b: int
    cooc: int
    score: float

    @property
    def key(self) -> tuple[str, str]:
        return (self.a, self.b)


@dataclass
class ScoreDataset:
    """Scored known pairs with a train/val/test split and score statistics.

    ``top_threshold`` is mean + 2*std of the score distribution (the
    upper ~5% cut used to call a pairing complementary).
    """

    pairs: list[PairStats]
    split: dict[tuple[str, str], str]
    mean: float
    std: float
    top_threshold: float
    _index: dict[tuple[str, str], PairStats] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self._index:
            self._index = {p.key: p for p in self.pairs}

    def lookup(self, a: str, b: str) -> PairStats | None:
        return self._index.get(pair_key(a, b))

    def pairs_for(self, split_name: str) -> list[PairStats]:
        if split_name not in SPLIT_NAMES:
            raise ValueError(f"unknown split '{split_name}' (expected one of {SPLIT_NAMES})")
        return [p for p in self.pairs if self.split[p.key] == split_name]

    def tokens(self) -> list[str]:
        seen = {t for p in self.pairs for t in (p.a, p.b)}
        return sorted(seen)


def build_dataset(
    table: CountTable,
    seed: int,
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
) -> ScoreDataset:
    """Score every surviving pair and split them train/val/test.

    Splits are assigned by a seeded uniform shuffle followed by contiguous
    slicing: floor(n*ratio) for train and val, the remainder to test.
    Statistics use the population standard deviation over all scores.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError("ratios must be three positive numbers")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("ratios must sum to 1")
    if not table.cooccurrence:
        raise ValueError("empty pair set: nothing to score")

    keys = sorted(table.cooccurrence)
    pairs = [
        PairStats(
            a=a,
            b=b,
            occ_a=table.occurrence[a],
            occ_b=table.occurrence[b],
            cooc=table.cooccurrence[(a, b)],
            score=npmi(table.cooccurrence[(a, b)], table.occurrence[a],
                       table.occurrence[b], table.recipe_count),
        )
        for a, b in keys
    ]

    n = len(pairs)
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(math.floor(ratios[0] * n))
    n_val = int(math.floor(ratios[1] * n))
    split: dict[tuple[str, str], str] = {}
    for rank, idx in enumerate(perm):
        if rank < n_train:
            name = "train"
        elif rank < n_train + n_val:
            name = "val"
        else:
            name = "test"
        split[pairs[idx].key] = name

    scores = np.array([p.score for p in pairs], dtype=np.float64)
    mean = float(scores.mean())
    std = float(scores.std())
    return ScoreDataset(pairs=pairs, split=split, mean=mean, std=std,
                        top_threshold=mean + 2.0 * std)


SCORES_HEADER = "ingredient_a\tingredient_b\tocc_a\tocc_b\tcooc\tnpmi\tsplit"


def write_scores(dataset: ScoreDataset, sink: IO[str]) -> None:
    """Write the scores TSV, rows sorted by pair key, npmi at 6 decimals."""
    sink.write(SCORES_HEADER + "\n")
    for p in sorted(dataset.pairs, key=lambda p: p.key):
        sink.write(
            f"{p.a}\t{p.b}\t{p.occ_a}\t{p.occ_b}\t{p.cooc}"
            f"\t{p.score:.6f}\t{dataset.split[p.key]}\n"
        )


def write_stats(dataset: ScoreDataset, sink: IO[str]) -> None:
    json.dump(
        {
            "n_pairs": len(dataset.pairs),
            "mean": dataset.mean,
            "std": dataset.std,
            "top_threshold": dataset.top_threshold,
        },
        sink,
    )
    sink.write("\n")


def read_scores(source: IO[str], stats: dict | None = None) -> ScoreDataset:
    """Parse a scores TSV back into a ScoreDataset.

    Statistics come from the ``stats`` sidecar object when given;
    otherwise they are recomputed from the (6-decimal) stored scores.
    """
    header = source.readline().rstrip("\n")
    if header != SCORES_HEADER:
        raise ValueError("unrecognized scores header")
    pairs: list[PairStats] = []
    split: dict[tuple[str, str], str] = {}
    for lineno, line in enumerate(source, 2):
        line = line.rstrip("\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 7:
            raise ValueError(f"line {lineno}: expected 7 columns")
        a, b, occ_a, occ_b, cooc, score, split_name = parts
        if split_name not in SPLIT_NAMES:
            raise ValueError(f"line {lineno}: unknown split '{split_name}'")
        p = PairStats(a=a, b=b, occ_a=int(occ_a), occ_b=int(occ_b),
                      cooc=int(cooc), score=float(score))
        pairs.append(p)
        split[p.key] = split_name
    if not pairs:
        raise ValueError("scores file has no pairs")
    if stats is not None:
        mean, std = float(stats["mean"]), float(stats["std"])
        top = float(stats["top_threshold"])
    else:
        arr = np.array([p.score for p in pairs], dtype=np.float64)
        mean, std = float(arr.mean()), float(arr.std())
        top = mean + 2.0 * std
    return ScoreDataset(pairs=pairs, split=split, mean=mean, std=std, top_threshold=top)
