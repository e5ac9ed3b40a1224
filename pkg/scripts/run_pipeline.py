#!/usr/bin/env python3
"""Run the full pipeline in one go: corpus -> counts -> scores ->
embeddings -> trained model -> metric report, ending with a sample
ranking.

Every stage goes through the CLI, so each artifact gets its manifest and
a rerun with the same flags reproduces the same bytes. Without
--recipes a deterministic synthetic corpus is generated first.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from pairkit import corpus
from pairkit.cli import main as cli


def run(argv: list[str]) -> None:
    print(f"$ pairkit {' '.join(argv)}")
    rc = cli(argv)
    if rc != 0:
        sys.exit(rc)


def busiest_token(counts_path: Path) -> str:
    with open(counts_path, encoding="utf-8") as f:
        table = corpus.read_counts(f)
    return max(sorted(table.occurrence), key=lambda t: table.occurrence[t])


def main() -> None:
    ap = argparse.ArgumentParser(
        description="corpus to ranked recommendations in one command")
    ap.add_argument("--workdir", default="pipeline_out")
    ap.add_argument("--recipes", default=None,
                    help="JSON-lines corpus; omitted -> synthetic corpus")
    ap.add_argument("--recipes-count", type=int, default=2000,
                    help="synthetic corpus size when --recipes is omitted")
    ap.add_argument("--seed", type=int, default=7,
                    help="synthetic corpus seed")
    ap.add_argument("--split-seed", type=int, default=1)
    ap.add_argument("--dim", type=int, default=32)
    ap.add_argument("--hidden", type=int, default=64)
    ap.add_argument("--max-epochs", type=int, default=200)
    ap.add_argument("--ingredient", default=None,
                    help="rank partners for this token at the end "
                         "(default: the most frequent token)")
    args = ap.parse_args()

    d = Path(args.workdir)
    d.mkdir(parents=True, exist_ok=True)

    recipes = args.recipes
    if recipes is None:
        recipes = str(d / "recipes.jsonl")
        run(["synth", "--recipes-count", str(args.recipes_count),
             "--seed", str(args.seed), "--out", recipes])

    counts = d / "counts.tsv"
    scores = d / "scores.tsv"
    embeddings = d / "embeddings.txt"
    model_dir = d / "model"
    report = d / "report.json"

    run(["ingest", "--recipes", recipes, "--out", str(counts)])
    run(["score", "--counts", str(counts), "--seed", str(args.split_seed),
         "--out", str(scores)])
    run(["embed", "--counts", str(counts), "--dim", str(args.dim),
         "--out", str(embeddings)])
    run(["train", "--scores", str(scores), "--embeddings", str(embeddings),
         "--out-dir", str(model_dir), "--hidden", str(args.hidden),
         "--max-epochs", str(args.max_epochs)])
    run(["eval", "--checkpoint", str(model_dir / "best.json"),
         "--scores", str(scores), "--embeddings", str(embeddings),
         "--split", "test", "--out", str(report)])

    token = args.ingredient or busiest_token(counts)
    run(["rank", "--checkpoint", str(model_dir / "best.json"),
         "--scores", str(scores), "--embeddings", str(embeddings),
         "--ingredient", token, "--k", "10"])
    print(f"artifacts in {d}")


if __name__ == "__main__":
    main()
