#!/usr/bin/env python3
"""Write the synthetic device corpus and its matching test set as JSONL.

The corpus is one single-fact document per device; the test set asks for
each fact verbatim. Useful as a self-contained fixture for the CLI:

    python3 scripts/make_synthetic_corpus.py --out-dir data
    ragforge ingest --corpus data/corpus.jsonl
    ragforge eval --testset data/testset.jsonl
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from ragforge import synth

logger = logging.getLogger("make_synthetic_corpus")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=50, help="number of documents")
    parser.add_argument("--cases", type=int, default=30, help="number of test questions")
    parser.add_argument("--out-dir", default="data", help="output directory")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    out = Path(args.out_dir)
    corpus_path = out / "corpus.jsonl"
    testset_path = out / "testset.jsonl"
    synth.write_corpus_jsonl(corpus_path, synth.make_corpus(args.docs))
    synth.write_testset_jsonl(testset_path, synth.make_testset(args.cases, args.docs))
    logger.info("wrote %s (%d docs) and %s (%d cases)",
                corpus_path, args.docs, testset_path, args.cases)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
