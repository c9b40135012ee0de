"""Deterministic synthetic corpus and test-set construction.

Each document states one device fact with a unique two-word device name, so
retrieval is lexically separable and end-to-end behavior can be checked
without any network fixtures. The same generator feeds unit tests, the
retrieval-vs-baseline comparison script, and the demo server.
"""

from __future__ import annotations

import json
from itertools import product
from pathlib import Path

from .evaluate import TestCase
from .ingest import Document

_PREFIXES = [
    "alpha", "bravo", "cobalt", "delta", "ember", "falcon",
    "granite", "helix", "indigo", "juniper", "krypton", "lattice",
]
_NOUNS = [
    "antenna", "beacon", "coupler", "duplexer", "emitter",
    "filter", "gateway", "horn", "isolator", "junction",
]


def device_name(i: int) -> str:
    # The serial keeps question->document token overlap two tokens ahead of
    # any other document, so hash-bucket collisions cannot flip rankings.
    prefix, noun = list(product(_PREFIXES, _NOUNS))[i]
    return f"{prefix} {noun} {i:03d}"


def fact_sentence(i: int) -> str:
    return f"The {device_name(i)} operates at {88 + 9 * i} MHz."


def question_for(i: int) -> str:
    return f"At what frequency does the {device_name(i)} operate?"


def make_corpus(n_docs: int = 50) -> list[Document]:
    if not 1 <= n_docs <= len(_PREFIXES) * len(_NOUNS):
        raise ValueError(f"n_docs must be in [1, {len(_PREFIXES) * len(_NOUNS)}]")
    docs = []
    for i in range(n_docs):
        text = f"{fact_sentence(i)}\nInstalled in sector {i:03d}."
        docs.append(Document(doc_id=f"dev{i:03d}", source="synthetic", text=text))
    return docs


def make_testset(n_cases: int = 30, n_docs: int = 50) -> list[TestCase]:
    if n_cases > n_docs:
        raise ValueError("n_cases cannot exceed n_docs")
    docs = make_corpus(n_docs)
    return [
        TestCase(
            question=question_for(i),
            ground_truth=fact_sentence(i),
            reference_contexts=(docs[i].text,),
        )
        for i in range(n_cases)
    ]


def write_corpus_jsonl(path, docs: list[Document]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps({
                "doc_id": doc.doc_id,
                "source": doc.source,
                "text": doc.text,
                "metadata": dict(doc.metadata),
            }) + "\n")


def write_testset_jsonl(path, cases: list[TestCase]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for case in cases:
            obj = {"question": case.question, "ground_truth": case.ground_truth}
            if case.reference_contexts is not None:
                obj["reference_contexts"] = list(case.reference_contexts)
            fh.write(json.dumps(obj) + "\n")
