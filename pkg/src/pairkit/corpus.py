"""Recipe ingestion and ingredient (co-)occurrence counting.

Recipes arrive as JSON lines with an ``id`` and a list of ingredient
names. Tokens are lowercased with internal whitespace collapsed to
underscores, duplicates within a recipe count once, and co-occurrence is
per-recipe presence of both tokens. Counting is a single streaming pass;
shards can be counted independently and merged with :func:`merge_counts`.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import IO, Iterable, Iterator

DEFAULT_MIN_OCCURRENCE = 21
DEFAULT_MIN_COOCCURRENCE = 5

_WS = re.compile(r"\s+")


def normalize_token(raw: str) -> str:
    """Lowercase and replace internal whitespace runs with underscores."""
    return _WS.sub("_", raw.strip().lower())


def pair_key(a: str, b: str) -> tuple[str, str]:
    """Canonical pair key: lexicographically smaller token first."""
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class RecipeRecord:
    id: str
    ingredients: frozenset[str]


@dataclass
class CountTable:
    """Occurrence and co-occurrence counts over a recipe corpus.

    ``occurrence[x]`` is the number of recipes containing token x;
    ``cooccurrence[(a, b)]`` (a < b) the number containing both.
    """

    recipe_count: int = 0
    occurrence: dict[str, int] = field(default_factory=dict)
    cooccurrence: dict[tuple[str, str], int] = field(default_factory=dict)

    def cooc(self, a: str, b: str) -> int:
        return self.cooccurrence.get(pair_key(a, b), 0)

    def vocabulary(self) -> list[str]:
        return sorted(self.occurrence)


def load_recipes(source: IO[bytes] | IO[str] | Iterable[str | bytes]) -> Iterator[RecipeRecord]:
    """Yield normalized recipes from a JSON-lines stream.

    Tokens are normalized and deduplicated; empty tokens are dropped;
    recipes with fewer than 2 distinct ingredients are skipped since they
    contribute no pairs. Raises ValueError with the 1-based line number on
    malformed lines.
    """
    for lineno, line in enumerate(source, 1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {lineno}: malformed JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise ValueError(f"line {lineno}: expected a JSON object")
        for name in ("id", "ingredients"):
            if name not in obj:
                raise ValueError(f"line {lineno}: missing field '{name}'")
        if not isinstance(obj["id"], str):
            raise ValueError(f"line {lineno}: field 'id' must be a string")
        raw = obj["ingredients"]
        if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
            raise ValueError(f"line {lineno}: field 'ingredients' must be an array of strings")
        tokens = frozenset(t for t in (normalize_token(x) for x in raw) if t)
        if len(tokens) < 2:
            continue
        yield RecipeRecord(id=obj["id"], ingredients=tokens)


def count_corpus(recipes: Iterable[RecipeRecord]) -> CountTable:
    """Count occurrences and canonical-pair co-occurrences in one pass."""
    n = 0
    occ: Counter[str] = Counter()
    cooc: Counter[tuple[str, str]] = Counter()
    for rec in recipes:
        n += 1
        occ.update(rec.ingredients)
        cooc.update(combinations(sorted(rec.ingredients), 2))
    return CountTable(recipe_count=n, occurrence=dict(occ), cooccurrence=dict(cooc))


def merge_counts(tables: Iterable[CountTable]) -> CountTable:
    """Sum counts from disjoint corpus shards; equivalent to serial counting."""
    n = 0
    occ: Counter[str] = Counter()
    cooc: Counter[tuple[str, str]] = Counter()
    for t in tables:
        n += t.recipe_count
        occ.update(t.occurrence)
        cooc.update(t.cooccurrence)
    return CountTable(recipe_count=n, occurrence=dict(occ), cooccurrence=dict(cooc))


def filter_counts(
    table: CountTable,
    min_occurrence: int = DEFAULT_MIN_OCCURRENCE,
    min_cooccurrence: int = DEFAULT_MIN_COOCCURRENCE,
) -> CountTable:
    """Apply the corpus thresholds that define the known candidate set.

    Tokens below ``min_occurrence`` are removed along with all their
    pairs; remaining pairs below ``min_cooccurrence`` are removed.
    ``recipe_count`` is unchanged.
    """
    if min_occurrence < 1 or min_cooccurrence < 1:
        raise ValueError("thresholds must be >= 1")
    occ = {t: c for t, c in table.occurrence.items() if c >= min_occurrence}
    cooc = {
        (a, b): c
        for (a, b), c in table.cooccurrence.items()
        if a in occ and b in occ and c >= min_cooccurrence
    }
    return CountTable(recipe_count=table.recipe_count, occurrence=occ, cooccurrence=cooc)


def write_counts(table: CountTable, sink: IO[str]) -> None:
    """Write the counts TSV: '#recipes', then OCC lines, then COOC lines.

    Lines are sorted lexicographically within each section so output is
    deterministic.
    """
    sink.write(f"#recipes\t{table.recipe_count}\n")
    for token in sorted(table.occurrence):
        sink.write(f"OCC\t{token}\t{table.occurrence[token]}\n")
    for a, b in sorted(table.cooccurrence):
        sink.write(f"COOC\t{a}\t{b}\t{table.cooccurrence[(a, b)]}\n")


def read_counts(source: IO[str]) -> CountTable:
    """Parse a counts TSV written by :func:`write_counts`."""
    recipe_count: int | None = None
    occ: dict[str, int] = {}
    cooc: dict[tuple[str, str], int] = {}
    for lineno, line in enumerate(source, 1):
        line = line.rstrip("\n")
        if not line:
            continue
        parts = line.split("\t")
        if parts[0] == "#recipes" and len(parts) == 2:
            recipe_count = int(parts[1])
        elif parts[0] == "OCC" and len(parts) == 3:
            occ[parts[1]] = int(parts[2])
        elif parts[0] == "COOC" and len(parts) == 4:
            if parts[1] >= parts[2]:
                raise ValueError(f"line {lineno}: pair not in canonical order")
            cooc[(parts[1], parts[2])] = int(parts[3])
        else:
            raise ValueError(f"line {lineno}: unrecognized counts line")
    if recipe_count is None:
        raise ValueError("counts file has no '#recipes' line")
    return CountTable(recipe_count=recipe_count, occurrence=occ, cooccurrence=cooc)
