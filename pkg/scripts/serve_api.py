#!/usr/bin/env python3
"""Point the HTTP API at a finished pipeline directory.

Writes service.json next to the artifacts, then hands off to the serve
command. Pass --cors-allowed-origin when a browser frontend on another
origin needs to call the API.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pairkit.cli import main as cli


def main() -> None:
    ap = argparse.ArgumentParser(
        description="serve a trained model over HTTP")
    ap.add_argument("--workdir", default="pipeline_out",
                    help="directory produced by run_pipeline.py")
    ap.add_argument("--host", default="127.0.0.1")
    ap.add_argument("--port", type=int, default=8080)
    ap.add_argument("--cors-allowed-origin", default=None)
    args = ap.parse_args()

    d = Path(args.workdir)
    config = {
        "checkpoint": str(d / "model" / "best.json"),
        "embeddings": str(d / "embeddings.txt"),
        "scores": str(d / "scores.tsv"),
        "host": args.host,
        "port": args.port,
    }
    if args.cors_allowed_origin is not None:
        config["cors_allowed_origin"] = args.cors_allowed_origin
    path = d / "service.json"
    path.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    print(f"wrote {path}")
    sys.exit(cli(["serve", "--config", str(path)]))


if __name__ == "__main__":
    main()
