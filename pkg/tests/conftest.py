"""Shared fixtures: one desk-scale artifact set built once per session.

The planted-structure corpus gives every later stage something real to
chew on (graded scores, a populated complementary class, known and
unknown pairs) while staying small enough to rebuild in a couple of
seconds.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import pytest

from pairkit import corpus, synth
from pairkit.corpus import CountTable
from pairkit.embedding import EmbeddingTable, save_embeddings, train_ppmi_svd
from pairkit.model import Hyperparams, ModelParams, save_checkpoint
from pairkit.pairscore import ScoreDataset, build_dataset, write_scores, write_stats
from pairkit.recommend import Recommender
from pairkit.train import TrainConfig, train_loop

DESK_CORPUS_SEED = 7
DESK_SPLIT_SEED = 1   # chosen so val and test are two-class at the threshold
DESK_DIM = 16


@dataclass
class DeskArtifacts:
    root: Path
    recipes_path: Path
    counts_path: Path
    scores_path: Path
    stats_path: Path
    embeddings_path: Path
    checkpoint_path: Path
    table: CountTable
    dataset: ScoreDataset
    embeddings: EmbeddingTable
    params: ModelParams
    hp: Hyperparams
    recommender: Recommender


@pytest.fixture(scope="session")
def desk(tmp_path_factory: pytest.TempPathFactory) -> DeskArtifacts:
    root = tmp_path_factory.mktemp("desk")
    recipes = synth.synth_recipes(2000, seed=DESK_CORPUS_SEED)
    recipes_path = root / "recipes.jsonl"
    with open(recipes_path, "w", encoding="utf-8") as f:
        synth.write_recipes_jsonl(recipes, f)

    table = corpus.filter_counts(corpus.count_corpus(recipes))
    counts_path = root / "counts.tsv"
    with open(counts_path, "w", encoding="utf-8") as f:
        corpus.write_counts(table, f)

    dataset = build_dataset(table, seed=DESK_SPLIT_SEED)
    scores_path = root / "scores.tsv"
    stats_path = root / "scores.stats.json"
    with open(scores_path, "w", encoding="utf-8") as f:
        write_scores(dataset, f)
    with open(stats_path, "w", encoding="utf-8") as f:
        write_stats(dataset, f)

    embeddings = train_ppmi_svd(table, dim=DESK_DIM)
    embeddings_path = root / "embeddings.txt"
    with open(embeddings_path, "w", encoding="utf-8") as f:
        save_embeddings(embeddings, f)

    hp = Hyperparams(input_dim=DESK_DIM, hidden_i=DESK_DIM, hidden_j=DESK_DIM)
    result = train_loop(dataset, embeddings, hp,
                        TrainConfig(max_epochs=30, patience=30, seed=0))
    checkpoint_path = root / "best.json"
    with open(checkpoint_path, "w", encoding="utf-8") as f:
        save_checkpoint(result.params, hp, f)

    recommender = Recommender(params=result.params, hp=hp,
                              embeddings=embeddings, dataset=dataset)
    return DeskArtifacts(
        root=root, recipes_path=recipes_path, counts_path=counts_path,
        scores_path=scores_path, stats_path=stats_path,
        embeddings_path=embeddings_path, checkpoint_path=checkpoint_path,
        table=table, dataset=dataset, embeddings=embeddings,
        params=result.params, hp=hp, recommender=recommender)
