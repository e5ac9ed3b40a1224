"""Deterministic synthetic recipe corpora with planted pairing structure.

The generator plants three kinds of signal so desk-scale corpora exercise
the whole pipeline:

- ingredient groups whose members co-occur heavily (strongly positive
  scores, the "complementary" cluster),
- staples whose appearance probability depends on group parity (mild
  positive and negative scores, plus informative embedding rows),
- duo tokens that only ever appear together (score exactly 1, a long
  right tail so the mean + 2 std cut keeps both classes populated).

Occasional visitors from other groups create rare cross-group pairs with
slightly negative scores. Rates are tuned so every token clears the
occurrence threshold and planted pairs clear the co-occurrence threshold
at 1,000 recipes and up.
"""

from __future__ import annotations

import json
from typing import IO, Sequence

import numpy as np

from .corpus import RecipeRecord


def synth_recipes(n_recipes: int, seed: int, n_groups: int = 8,
                  group_size: int = 6, n_staples: int = 4,
                  n_duos: int = 3) -> list[RecipeRecord]:
    """Generate a corpus; same arguments, same recipes, bit for bit."""
    if n_recipes < 1 or n_groups < 2 or group_size < 3:
        raise ValueError("need n_recipes >= 1, n_groups >= 2, group_size >= 3")
    rng = np.random.default_rng(seed)
    groups = [[f"ing_{g:02d}_{i:02d}" for i in range(group_size)]
              for g in range(n_groups)]
    staples = [f"staple_{s:02d}" for s in range(n_staples)]
    duos = [(f"duo_{d:02d}_a", f"duo_{d:02d}_b") for d in range(n_duos)]

    recipes: list[RecipeRecord] = []
    for r in range(n_recipes):
        g = int(rng.integers(n_groups))
        k = 2 + int(rng.integers(3))
        members = rng.choice(group_size, size=k, replace=False)
        tokens = {groups[g][m] for m in members}
        if rng.random() < 0.25:
            g2 = int(rng.integers(n_groups))
            tokens.add(groups[g2][int(rng.integers(group_size))])
        for s, staple in enumerate(staples):
            p = 0.65 if (g % 2) == (s % 2) else 0.25
            if rng.random() < p:
                tokens.add(staple)
        for duo_a, duo_b in duos:
            if rng.random() < 0.04:
                tokens.add(duo_a)
                tokens.add(duo_b)
        recipes.append(RecipeRecord(id=f"r{r:05d}", ingredients=frozenset(tokens)))
    return recipes


def write_recipes_jsonl(recipes: Sequence[RecipeRecord], sink: IO[str]) -> None:
    """One recipe per line in the ingest input format; ingredients sorted
    so output is reproducible."""
    for rec in recipes:
        json.dump({"id": rec.id, "ingredients": sorted(rec.ingredients)}, sink)
        sink.write("\n")
