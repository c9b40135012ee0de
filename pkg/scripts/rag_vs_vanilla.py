#!/usr/bin/env python3
"""Compare retrieval-augmented answering against the no-context baseline.

Builds an index over the synthetic corpus, evaluates the same test set
twice (echo provider with retrieval, refusal provider without), and prints
both metric tables plus the correctness gap. Everything runs offline.
"""

from __future__ import annotations

import argparse
import logging
import tempfile
from dataclasses import replace
from pathlib import Path

from ragforge import synth
from ragforge.config import default_config
from ragforge.evaluate import EmbeddingJudge, JudgeSpec, render_report_table, run_eval
from ragforge.pipeline import pipeline_init

logger = logging.getLogger("rag_vs_vanilla")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=50, help="corpus size")
    parser.add_argument("--cases", type=int, default=30, help="test set size")
    parser.add_argument("--workdir", help="directory for corpus and index (default: temp)")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    with tempfile.TemporaryDirectory() as tmp:
        workdir = Path(args.workdir) if args.workdir else Path(tmp)
        workdir.mkdir(parents=True, exist_ok=True)
        corpus = workdir / "corpus.jsonl"
        synth.write_corpus_jsonl(corpus, synth.make_corpus(args.docs))
        testset = synth.make_testset(args.cases, args.docs)
        judge = EmbeddingJudge(JudgeSpec())

        rag_config = replace(
            default_config(),
            corpus_path=str(corpus),
            index_path=str(workdir / "index.rgf"),
        )
        rag = pipeline_init(rag_config)
        rag_report = run_eval(testset, rag, judge, rag.embedder, dataset_name="synthetic")

        vanilla_config = replace(
            rag_config, mode="vanilla", gen=replace(rag_config.gen, provider="refusal"),
        )
        vanilla = pipeline_init(vanilla_config)
        vanilla_report = run_eval(testset, vanilla, judge, vanilla.embedder,
                                  dataset_name="synthetic")

    print()
    print(render_report_table(rag_report))
    print()
    print(render_report_table(vanilla_report))
    print()
    gap = rag_report.mean_correctness - vanilla_report.mean_correctness
    print(f"correctness gap (retrieval - baseline): {gap:+.4f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
