#!/usr/bin/env python3
"""Serve a ready-to-query demo: synthetic corpus, offline providers.

Builds (or reuses) an index over the generated corpus and runs the HTTP
service. Pair it with the chat client in frontend/ to poke at the full
stack without any credentials:

    python3 scripts/serve_demo.py --port 8765
    curl -s localhost:8765/healthz
"""

from __future__ import annotations

import argparse
import logging
from dataclasses import replace
from pathlib import Path

from ragforge import synth
from ragforge.config import default_config
from ragforge.pipeline import pipeline_init
from ragforge.server import serve

logger = logging.getLogger("serve_demo")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=50, help="corpus size")
    parser.add_argument("--workdir", default="demo-data", help="corpus and index directory")
    parser.add_argument("--host", default="127.0.0.1", help="bind host")
    parser.add_argument("--port", type=int, default=8765, help="bind port")
    parser.add_argument("--ui-dir", help="static chat UI directory (default: frontend/public)")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    workdir = Path(args.workdir)
    corpus = workdir / "corpus.jsonl"
    synth.write_corpus_jsonl(corpus, synth.make_corpus(args.docs))
    config = replace(
        default_config(),
        corpus_path=str(corpus),
        index_path=str(workdir / "index.rgf"),
        serve_host=args.host,
        serve_port=args.port,
    )
    pipeline = pipeline_init(config)

    ui_dir = args.ui_dir
    if ui_dir is None:
        candidate = Path("frontend/public")
        ui_dir = candidate if candidate.is_dir() else None
    logger.info("try: curl -s -X POST localhost:%d/query -d '%s'",
                args.port, '{"question": "' + synth.question_for(0) + '"}')
    serve(pipeline, config.serve_host, config.serve_port, ui_dir=ui_dir)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
