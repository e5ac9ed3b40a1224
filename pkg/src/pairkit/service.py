"""Read-only HTTP JSON API over a trained pairing model.

Stateless after startup: artifacts load once, every request is a pure
read. Scores in responses come from the same recommend-module calls the
CLI uses, and JSON float serialization is the shortest round-trip form,
so all three interfaces agree to the last decimal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .embedding import load_embeddings
from .model import load_checkpoint
from .pairscore import read_scores
from .recommend import PairingAnswer, Recommender, UnknownIngredientError, suggest

FILTER_ALIASES = {"all": "all", "known": "known_only", "unknown": "unknown_only"}


@dataclass(frozen=True)
class ServiceConfig:
    checkpoint: str
    embeddings: str
    scores: str
    stats: str | None = None          # defaults to <scores stem>.stats.json
    host: str = "127.0.0.1"
    port: int = 8080
    cors_allowed_origin: str | None = None


def default_stats_path(scores_path: str | Path) -> Path:
    p = Path(scores_path)
    return p.with_name(p.stem + ".stats.json")


def load_service_config(path: str | Path) -> ServiceConfig:
    with open(path, encoding="utf-8") as f:
        raw = json.load(f)
    if not isinstance(raw, dict):
        raise ValueError("service config must be a JSON object")
    required = ("checkpoint", "embeddings", "scores")
    missing = [k for k in required if k not in raw]
    if missing:
        raise ValueError(f"service config missing keys: {', '.join(missing)}")
    allowed = {"checkpoint", "embeddings", "scores", "stats", "host", "port",
               "cors_allowed_origin"}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ValueError(f"service config has unknown keys: {', '.join(unknown)}")
    return ServiceConfig(**raw)


@dataclass
class ServiceArtifacts:
    recommender: Recommender
    occurrence: dict[str, int]        # listing vocabulary with corpus counts

    @property
    def vocab_size(self) -> int:
        return len(self.recommender.vocabulary())


def load_artifacts(config: ServiceConfig) -> ServiceArtifacts:
    """Load every artifact or raise; the serve command maps failures to a
    nonzero exit."""
    with open(config.checkpoint, encoding="utf-8") as f:
        params, hp = load_checkpoint(f)
    with open(config.embeddings, encoding="utf-8") as f:
        embeddings = load_embeddings(f)
    stats_path = config.stats if config.stats is not None \
        else default_stats_path(config.scores)
    with open(stats_path, encoding="utf-8") as f:
        stats = json.load(f)
    with open(config.scores, encoding="utf-8") as f:
        dataset = read_scores(f, stats=stats)
    if embeddings.dim != hp.input_dim:
        raise ValueError(
            f"embedding dim {embeddings.dim} does not match model input_dim {hp.input_dim}")
    rec = Recommender(params=params, hp=hp, embeddings=embeddings, dataset=dataset)

    # Listing vocabulary: dataset tokens that are actually scorable, with
    # corpus occurrence counts taken from the scores table.
    occurrence: dict[str, int] = {}
    for p in dataset.pairs:
        occurrence[p.a] = p.occ_a
        occurrence[p.b] = p.occ_b
    occurrence = {t: c for t, c in occurrence.items() if t in embeddings}
    return ServiceArtifacts(recommender=rec, occurrence=occurrence)


def _bad_request(detail: str) -> JSONResponse:
    return JSONResponse(status_code=400,
                        content={"error": "invalid_parameter", "detail": detail})


def _unknown_token(exc: UnknownIngredientError) -> JSONResponse:
    return JSONResponse(status_code=404, content={
        "error": "unknown_ingredient",
        "token": exc.token,
        "suggestions": exc.suggestions,
    })


def _score_cell(ans: PairingAnswer) -> dict:
    return {
        "a": ans.ingredient,
        "b": ans.partner,
        "predicted_score": ans.predicted_score,
        "status": ans.status,
        "true_score": ans.true_score,
        "cooccurrence": ans.cooccurrence,
    }


def _rank_entry(ans: PairingAnswer) -> dict:
    return {
        "ingredient": ans.ingredient,
        "partner": ans.partner,
        "predicted_score": ans.predicted_score,
        "status": ans.status,
        "true_score": ans.true_score,
        "cooccurrence": ans.cooccurrence,
    }


def _parse_int(raw: str | None, default: int, lo: int, hi: int,
               name: str) -> int:
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer")
    if not (lo <= value <= hi):
        raise ValueError(f"{name} must be between {lo} and {hi}")
    return value


def create_app(artifacts: ServiceArtifacts,
               cors_allowed_origin: str | None = None) -> FastAPI:
    app = FastAPI(title="pairkit", docs_url=None, redoc_url=None,
                  openapi_url=None)
    if cors_allowed_origin is not None:
        from fastapi.middleware.cors import CORSMiddleware
        app.add_middleware(CORSMiddleware,
                           allow_origins=[cors_allowed_origin],
                           allow_methods=["GET", "POST"],
                           allow_headers=["*"])
    rec = artifacts.recommender
    # frequency-first listing order, precomputed once
    listing = sorted(artifacts.occurrence.items(), key=lambda kv: (-kv[1], kv[0]))

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "vocab_size": artifacts.vocab_size}

    @app.get("/api/ingredients")
    def ingredients(prefix: str = "", limit: str | None = None):
        try:
            n = _parse_int(limit, default=20, lo=1, hi=200, name="limit")
        except ValueError as exc:
            return _bad_request(str(exc))
        rows = [{"token": t, "occurrence": c}
                for t, c in listing if t.startswith(prefix)]
        return rows[:n]

    @app.get("/api/score")
    def score(a: str | None = None, b: str | None = None):
        if a is None or b is None:
            return _bad_request("parameters a and b are required")
        if a == b:
            return _bad_request("a and b must be different ingredients")
        try:
            ans = rec.score_pair(a, b)
        except UnknownIngredientError as exc:
            return _unknown_token(exc)
        return _score_cell(ans)

    @app.get("/api/rank")
    def rank(ingredient: str | None = None, k: str | None = None,
             filter: str | None = None):
        if ingredient is None:
            return _bad_request("parameter ingredient is required")
        try:
            n = _parse_int(k, default=10, lo=1, hi=1000, name="k")
        except ValueError as exc:
            return _bad_request(str(exc))
        filter_name = filter if filter is not None else "all"
        if filter_name not in FILTER_ALIASES:
            return _bad_request("filter must be one of all, known, unknown")
        try:
            answers = rec.rank_partners(ingredient, limit=n,
                                        pair_filter=FILTER_ALIASES[filter_name])
        except UnknownIngredientError as exc:
            return _unknown_token(exc)
        return [_rank_entry(a) for a in answers]

    @app.post("/api/compare")
    async def compare(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _bad_request("body must be valid JSON")
        if not isinstance(body, dict):
            return _bad_request("body must be a JSON object")
        targets = body.get("targets")
        probes = body.get("probes")
        for name, arr in (("targets", targets), ("probes", probes)):
            if not isinstance(arr, list) or not arr \
                    or not all(isinstance(t, str) for t in arr):
                return _bad_request(f"{name} must be a nonempty list of strings")
            if len(arr) > 10:
                return _bad_request(f"{name} must have at most 10 entries")
        unknown = sorted({t for t in targets + probes if t not in rec.embeddings})
        if unknown:
            vocab = rec.vocabulary()
            return JSONResponse(status_code=404, content={
                "error": "unknown_ingredient",
                "tokens": unknown,
                "suggestions": {t: suggest(t, vocab) for t in unknown},
            })
        grid = []
        for target in targets:
            row = rec.compare_targets(target, probes)
            grid.append([_score_cell(ans) for ans in row])
        return {"targets": targets, "probes": probes, "grid": grid}

    return app


def build_app(config: ServiceConfig) -> FastAPI:
    return create_app(load_artifacts(config), config.cors_allowed_origin)


def run_service(config: ServiceConfig) -> None:
    """Blocking uvicorn server; artifacts load first so a broken config
    fails before the socket opens."""
    import uvicorn

    app = build_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
