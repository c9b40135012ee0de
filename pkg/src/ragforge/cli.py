"""Command-line entry point: ingest, query, eval, serve.

Every subcommand takes --config <ini> plus flag overrides; flags win.
Defaults run the fully offline stack (deterministic embedder, echo
provider), so no credentials or network are needed for local use.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import load_config
from .errors import RagforgeError
from .evaluate import load_testset, make_judge, render_report_table, report_to_dict, run_eval
from .pipeline import pipeline_init
from .server import serve

logger = logging.getLogger(__name__)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="INI config file")
    sub.add_argument("--index", help="index file path override")
    sub.add_argument("--verbose", action="store_true", help="debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ragforge",
        description="Retrieval-augmented question answering over a document corpus.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser("ingest", help="build (or refresh) the vector index")
    _add_common(ingest)
    ingest.add_argument("--corpus", help="corpus directory of .txt files, or a JSONL file")
    ingest.add_argument("--chunk-size", type=int, help="window size in characters")
    ingest.add_argument("--overlap", type=int, help="window overlap in characters")
    ingest.add_argument("--force", action="store_true", help="rebuild even on cache hit")

    query = commands.add_parser("query", help="answer one question")
    _add_common(query)
    query.add_argument("question", help="the question to answer")
    query.add_argument("--mode", choices=["rag", "vanilla"], help="retrieval mode")
    query.add_argument("--json", action="store_true", help="print the full JSON response")

    evalcmd = commands.add_parser("eval", help="score the pipeline against a test set")
    _add_common(evalcmd)
    evalcmd.add_argument("--testset", help="JSONL test set path")
    evalcmd.add_argument("--mode", choices=["rag", "vanilla"], help="retrieval mode")
    evalcmd.add_argument("--judge", choices=["embedding", "llm"], help="statement judge")
    evalcmd.add_argument("--report", help="write the full JSON report here")

    servecmd = commands.add_parser("serve", help="run the HTTP service")
    _add_common(servecmd)
    servecmd.add_argument("--corpus", help="corpus to (re)index on startup")
    servecmd.add_argument("--host", help="bind host")
    servecmd.add_argument("--port", type=int, help="bind port")
    servecmd.add_argument("--ui-dir", help="static chat UI directory served at /ui")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, str]:
    mapping = {
        "corpus": "ingest.corpus",
        "chunk_size": "ingest.chunk_size",
        "overlap": "ingest.overlap",
        "index": "index.path",
        "mode": "gen.mode",
        "judge": "eval.judge",
        "testset": "eval.testset",
        "host": "serve.host",
        "port": "serve.port",
    }
    out: dict[str, str] = {}
    for attr, dotted in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            out[dotted] = str(value)
    return out


def _cmd_ingest(args) -> int:
    config = load_config(args.config, _overrides(args))
    if not config.corpus_path:
        print("ingest requires --corpus (or ingest.corpus in the config)", file=sys.stderr)
        return 2
    pipeline = pipeline_init(config, force_rebuild=args.force)
    print(f"index ready: {config.index_path} ({pipeline.index_entries} entries)")
    return 0


def _cmd_query(args) -> int:
    config = load_config(args.config, _overrides(args))
    pipeline = pipeline_init(config)
    response = pipeline.answer_query(args.question)
    if args.json:
        print(json.dumps(response.to_payload(), ensure_ascii=False, indent=2))
        return 0
    print(response.answer)
    if response.hits:
        print()
        for rank, hit in enumerate(response.hits, start=1):
            snippet = hit["snippet"].replace("\n", " ")
            if len(snippet) > 100:
                snippet = snippet[:97] + "..."
            print(f"  {rank:2d}. {hit['score']:.4f}  {hit['chunk_id']}  {snippet}")
    return 0


def _cmd_eval(args) -> int:
    config = load_config(args.config, _overrides(args))
    testset_path = config.testset_path
    if not testset_path:
        print("eval requires --testset (or eval.testset in the config)", file=sys.stderr)
        return 2
    pipeline = pipeline_init(config)
    judge = make_judge(config.judge, provider=pipeline.provider)
    report = run_eval(
        load_testset(testset_path),
        pipeline,
        judge,
        pipeline.embedder,
        dataset_name=Path(testset_path).stem,
        omega=config.omega,
    )
    if args.report:
        Path(args.report).write_text(
            json.dumps(report_to_dict(report), ensure_ascii=False, indent=2),
            encoding="utf-8",
        )
        print(f"wrote {args.report}")
    print(render_report_table(report))
    return 0 if report.n_failures == 0 else 1


def _cmd_serve(args) -> int:
    config = load_config(args.config, _overrides(args))
    pipeline = pipeline_init(config)
    ui_dir = args.ui_dir
    if ui_dir is None:
        candidate = Path("frontend/public")
        ui_dir = candidate if candidate.is_dir() else None
    serve(pipeline, config.serve_host, config.serve_port, ui_dir=ui_dir)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {
        "ingest": _cmd_ingest,
        "query": _cmd_query,
        "eval": _cmd_eval,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except RagforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
