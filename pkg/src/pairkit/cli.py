"""One executable, seven subcommands, the whole pipeline from files on
disk: ingest -> score -> embed -> train -> eval / rank / serve.

Every subcommand is deterministic given its flags and inputs. A manifest
JSON (inputs, outputs, settings, original argv; no timestamps) is written
next to each produced artifact so any stage can be reproduced exactly.
Summaries go to standard output, diagnostics to standard error, exit code
0 only on full success.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus, evaluation, pairscore, recommend, synth
from .embedding import load_embeddings, random_table, save_embeddings, train_ppmi_svd
from .model import Hyperparams, load_checkpoint, save_checkpoint
from .pairscore import build_dataset, read_scores
from .recommend import Recommender, UnknownIngredientError
from .service import default_stats_path, load_service_config, run_service
from .train import TrainConfig, train_loop, write_training_log


def _write_manifest(path: Path, stage: str, argv: list[str], inputs: dict,
                    outputs: dict, settings: dict) -> None:
    obj = {"stage": stage, "argv": argv, "inputs": inputs,
           "outputs": outputs, "settings": settings}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def _load_dataset(scores_path: str) -> pairscore.ScoreDataset:
    stats = None
    stats_path = default_stats_path(scores_path)
    if stats_path.exists():
        with open(stats_path, encoding="utf-8") as f:
            stats = json.load(f)
    with open(scores_path, encoding="utf-8") as f:
        return read_scores(f, stats=stats)


def cmd_ingest(args: argparse.Namespace, argv: list[str]) -> int:
    with open(args.recipes, encoding="utf-8") as f:
        table = corpus.count_corpus(corpus.load_recipes(f))
    if table.recipe_count == 0:
        print(f"error: no recipes in {args.recipes}", file=sys.stderr)
        return 1
    filtered = corpus.filter_counts(table, args.min_occurrence, args.min_cooccurrence)
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as f:
        corpus.write_counts(filtered, f)
    _write_manifest(out.with_name(out.name + ".manifest.json"), "ingest", argv,
                    {"recipes": args.recipes}, {"counts": args.out},
                    {"min_occurrence": args.min_occurrence,
                     "min_cooccurrence": args.min_cooccurrence})
    print(f"recipes: {filtered.recipe_count}")
    print(f"vocabulary: {len(filtered.occurrence)}")
    print(f"known pairs: {len(filtered.cooccurrence)}")
    return 0


def cmd_score(args: argparse.Namespace, argv: list[str]) -> int:
    parts = args.ratios.split(",")
    if len(parts) != 3:
        print("error: --ratios must be three comma-separated numbers", file=sys.stderr)
        return 1
    ratios = tuple(float(p) for p in parts)
    with open(args.counts, encoding="utf-8") as f:
        table = corpus.read_counts(f)
    dataset = build_dataset(table, seed=args.seed, ratios=ratios)
    out = Path(args.out)
    stats_path = default_stats_path(out)
    with open(out, "w", encoding="utf-8") as f:
        pairscore.write_scores(dataset, f)
    with open(stats_path, "w", encoding="utf-8") as f:
        pairscore.write_stats(dataset, f)
    _write_manifest(out.with_name(out.name + ".manifest.json"), "score", argv,
                    {"counts": args.counts},
                    {"scores": args.out, "stats": str(stats_path)},
                    {"seed": args.seed, "ratios": list(ratios)})
    sizes = {name: len(dataset.pairs_for(name)) for name in ("train", "val", "test")}
    print(f"pairs: {len(dataset.pairs)} "
          f"(train {sizes['train']}, val {sizes['val']}, test {sizes['test']})")
    print(f"mean: {dataset.mean:.6f}  std: {dataset.std:.6f}  "
          f"top threshold: {dataset.top_threshold:.6f}")
    return 0


def cmd_embed(args: argparse.Namespace, argv: list[str]) -> int:
    with open(args.counts, encoding="utf-8") as f:
        table = corpus.read_counts(f)
    if args.load is not None:
        with open(args.load, encoding="utf-8") as f:
            emb = load_embeddings(f, vocabulary=table.vocabulary())
        settings = {"source": "pretrained"}
        inputs = {"counts": args.counts, "pretrained": args.load}
    else:
        emb = train_ppmi_svd(table, dim=args.dim, shift=args.shift)
        settings = {"source": "ppmi_svd", "dim": args.dim, "shift": args.shift}
        inputs = {"counts": args.counts}
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as f:
        save_embeddings(emb, f)
    _write_manifest(out.with_name(out.name + ".manifest.json"), "embed", argv,
                    inputs, {"embeddings": args.out}, settings)
    print(f"embeddings: {len(emb.vectors)} tokens, dim {emb.dim}")
    return 0


def cmd_train(args: argparse.Namespace, argv: list[str]) -> int:
    dataset = _load_dataset(args.scores)
    if args.random_embeddings:
        dim = args.dim
        emb = random_table(dataset.tokens(), dim=dim, seed=args.seed)
        emb_input: dict = {"random_embeddings": True}
    else:
        if args.embeddings is None:
            print("error: --embeddings is required without --random-embeddings",
                  file=sys.stderr)
            return 1
        with open(args.embeddings, encoding="utf-8") as f:
            emb = load_embeddings(f)
        emb_input = {"embeddings": args.embeddings}
    hp = Hyperparams(input_dim=emb.dim, hidden_i=args.hidden,
                     hidden_j=args.hidden, symmetrize=args.symmetrize,
                     use_wide=not args.no_wide)
    config = TrainConfig(learning_rate=args.learning_rate,
                         batch_size=args.batch_size,
                         max_epochs=args.max_epochs,
                         patience=args.patience, seed=args.seed)
    result = train_loop(dataset, emb, hp, config)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    best_path = out_dir / "best.json"
    last_path = out_dir / "last.json"
    log_path = out_dir / "training_log.csv"
    with open(best_path, "w", encoding="utf-8") as f:
        save_checkpoint(result.params, hp, f)
    with open(last_path, "w", encoding="utf-8") as f:
        save_checkpoint(result.last_params, hp, f)
    with open(log_path, "w", encoding="utf-8") as f:
        write_training_log(result.log, f)
    _write_manifest(out_dir / "manifest.json", "train", argv,
                    {"scores": args.scores, **emb_input},
                    {"best": str(best_path), "last": str(last_path),
                     "log": str(log_path)},
                    {"hidden": args.hidden, "seed": args.seed,
                     "symmetrize": args.symmetrize, "no_wide": args.no_wide,
                     "learning_rate": args.learning_rate,
                     "batch_size": args.batch_size,
                     "max_epochs": args.max_epochs, "patience": args.patience})
    print(f"epochs run: {len(result.log)}")
    print(f"best epoch: {result.best_epoch}  val rmse: {result.best_val_rmse:.6f}")
    return 0


def cmd_eval(args: argparse.Namespace, argv: list[str]) -> int:
    dataset = _load_dataset(args.scores)
    pairs = dataset.pairs_for(args.split)
    if not pairs:
        print(f"error: split '{args.split}' is empty", file=sys.stderr)
        return 1
    with open(args.embeddings, encoding="utf-8") as f:
        emb = load_embeddings(f)
    if args.baseline == "cosine":
        predictor = evaluation.cosine_predictor(emb)
        model_input: dict = {"baseline": "cosine"}
    else:
        if args.checkpoint is None:
            print("error: --checkpoint is required without --baseline",
                  file=sys.stderr)
            return 1
        with open(args.checkpoint, encoding="utf-8") as f:
            params, hp = load_checkpoint(f)
        predictor = evaluation.model_predictor(params, hp, emb)
        model_input = {"checkpoint": args.checkpoint}
    report = evaluation.evaluate(predictor, pairs, dataset.top_threshold)
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as f:
        evaluation.write_report(report, f)
    _write_manifest(out.with_name(out.name + ".manifest.json"), "eval", argv,
                    {"scores": args.scores, "embeddings": args.embeddings,
                     **model_input},
                    {"report": args.out},
                    {"split": args.split, "threshold": dataset.top_threshold})
    print(f"{args.split}: n={report.n_examples} rmse={report.rmse:.6f} "
          f"corr={report.corr:.6f} r2={report.r2:.6f}")
    return 0


FILTER_CHOICES = ("all", "known", "unknown", "known_only", "unknown_only")


def cmd_rank(args: argparse.Namespace, argv: list[str]) -> int:
    del argv  # rank writes to stdout, no artifact, no manifest
    dataset = _load_dataset(args.scores)
    with open(args.embeddings, encoding="utf-8") as f:
        emb = load_embeddings(f)
    with open(args.checkpoint, encoding="utf-8") as f:
        params, hp = load_checkpoint(f)
    rec = Recommender(params=params, hp=hp, embeddings=emb, dataset=dataset)
    pair_filter = {
        "all": "all", "known": "known_only", "unknown": "unknown_only",
        "known_only": "known_only", "unknown_only": "unknown_only",
    }[args.filter]
    answers = rec.rank_partners(args.ingredient, limit=args.k,
                                pair_filter=pair_filter)
    recommend.write_ranking(answers, sys.stdout)
    return 0


def cmd_serve(args: argparse.Namespace, argv: list[str]) -> int:
    del argv
    config = load_service_config(args.config)
    run_service(config)
    return 0


def cmd_synth(args: argparse.Namespace, argv: list[str]) -> int:
    recipes = synth.synth_recipes(args.recipes_count, seed=args.seed)
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as f:
        synth.write_recipes_jsonl(recipes, f)
    _write_manifest(out.with_name(out.name + ".manifest.json"), "synth", argv,
                    {}, {"recipes": args.out},
                    {"n": args.recipes_count, "seed": args.seed})
    print(f"recipes: {len(recipes)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairkit",
        description="ingredient pairing scores, prediction and ranking")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="count a recipe corpus into a counts TSV")
    p.add_argument("--recipes", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-occurrence", type=int, default=21)
    p.add_argument("--min-cooccurrence", type=int, default=5)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("score", help="score pairs and split train/val/test")
    p.add_argument("--counts", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ratios", default="0.8,0.1,0.1")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("embed", help="train or validate ingredient embeddings")
    p.add_argument("--counts", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--shift", type=float, default=1.0)
    p.add_argument("--load", default=None,
                   help="validate a pretrained embeddings file instead of training")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("train", help="train the pairing score regressor")
    p.add_argument("--scores", required=True)
    p.add_argument("--embeddings", default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=64,
                   help="embedding dim when using --random-embeddings")
    p.add_argument("--no-wide", action="store_true")
    p.add_argument("--random-embeddings", action="store_true")
    p.add_argument("--symmetrize", action="store_true")
    p.add_argument("--learning-rate", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=512)
    p.add_argument("--max-epochs", type=int, default=200)
    p.add_argument("--patience", type=int, default=10)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="metric report for a checkpoint or baseline")
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--scores", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--out", required=True)
    p.add_argument("--baseline", choices=("cosine",), default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("rank", help="print the top partners for an ingredient")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--ingredient", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--filter", choices=FILTER_CHOICES, default="all")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("serve", help="run the HTTP JSON API")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth", help="write a deterministic synthetic corpus")
    p.add_argument("--recipes-count", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    raw_argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(raw_argv)
    try:
        return args.func(args, raw_argv)
    except UnknownIngredientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
