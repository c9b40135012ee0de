"""End-to-end wiring: corpus to index to answered queries.

pipeline_init builds (or reopens) the vector index: preprocess, chunk,
embed, add, persist. A content hash of the corpus plus the structural
config is stored in the index header, so reruns with unchanged inputs skip
re-embedding entirely. Index writes are atomic; a failure at any stage
leaves no partial file behind.

answer_query runs the retrieval path (embed the question, exact cosine
search, percentile filter) and hands the ranked contexts to the generation
provider. Vanilla mode skips retrieval and sends a context-free prompt.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, replace
from pathlib import Path

from .config import (
    MODE_RAG,
    MODE_VANILLA,
    PROVIDER_ECHO,
    PROVIDER_REFUSAL,
    PROVIDER_REMOTE,
    GenDefaults,
    PipelineConfig,
)
from .embed import make_embedder
from .errors import (
    DimensionMismatchError,
    EmptyIndexError,
    PipelineInitError,
    ProviderRefusalError,
    ProviderUnreachableError,
)
from .gen import (
    EchoProvider,
    GenerationRequest,
    RankedContext,
    RefusalProvider,
    RemoteChatProvider,
    generate,
)
from .ingest import chunk_document, load_corpus, preprocess
from .kb import KbEntry, VectorIndex, percentile_filter

logger = logging.getLogger(__name__)


@dataclass
class QueryResponse:
    """Answer plus the ranked retrieval evidence behind it.

    hits is None in vanilla mode. Each hit is {"chunk_id", "score",
    "snippet"} with the full chunk text as the snippet.
    """

    answer: str
    mode: str
    hits: list[dict] | None
    timing_ms: dict[str, float]

    def to_payload(self, include_timing: bool = True) -> dict:
        payload: dict = {"answer": self.answer, "mode": self.mode, "hits": self.hits}
        if include_timing:
            payload["timing_ms"] = {k: round(v, 3) for k, v in self.timing_ms.items()}
        return payload

    def canonical_json(self) -> str:
        """Deterministic serialization; timing varies per run so it is excluded."""
        return json.dumps(
            self.to_payload(include_timing=False),
            sort_keys=True,
            ensure_ascii=False,
            separators=(",", ":"),
        )


def make_provider(gen: GenDefaults):
    if gen.provider == PROVIDER_ECHO:
        return EchoProvider()
    if gen.provider == PROVIDER_REFUSAL:
        return RefusalProvider()
    if gen.provider == PROVIDER_REMOTE:
        return RemoteChatProvider(gen.endpoint)
    raise ValueError(f"unknown gen provider: {gen.provider!r}")


def corpus_fingerprint(docs, config: PipelineConfig) -> str:
    """Content hash of the corpus and the structure-affecting config.

    Query-time knobs (nprobe, retrieval_k, percentile_p) are excluded so
    tuning them never forces a re-embed.
    """
    h = hashlib.blake2b(digest_size=16)
    structural = (
        f"chunk={config.chunk_policy.chunk_size}/{config.chunk_policy.overlap};"
        f"embed={config.embedder.kind}/{config.embedder.model_name}/{config.embedder.dim};"
        f"index={config.index.mode}/{config.index.num_clusters}"
    )
    h.update(structural.encode("utf-8"))
    for doc in sorted(docs, key=lambda d: d.doc_id):
        h.update(b"\x00doc\x00")
        h.update(doc.doc_id.encode("utf-8"))
        h.update(b"\x00")
        h.update(doc.text.encode("utf-8"))
    return h.hexdigest()


def _stage(name: str, fn):
    try:
        return fn()
    except PipelineInitError:
        raise
    except Exception as exc:
        raise PipelineInitError(f"{name}: {exc}") from exc


class Pipeline:
    """An initialized engine: index, embedder, and generation provider."""

    def __init__(self, config: PipelineConfig, *, index: VectorIndex | None,
                 embedder, provider):
        self.config = config
        self.index = index
        self.embedder = embedder
        self.provider = provider

    @property
    def mode(self) -> str:
        return self.config.mode

    @property
    def model_name(self) -> str:
        return self.config.gen.model_name

    @property
    def index_entries(self) -> int:
        return len(self.index) if self.index is not None else 0

    def answer_query(self, question: str, mode: str | None = None) -> QueryResponse:
        """Retrieve (rag mode), assemble the prompt, and generate an answer."""
        if not question or not question.strip():
            raise ValueError("question must be non-empty")
        mode = mode or self.config.mode
        if mode not in (MODE_RAG, MODE_VANILLA):
            raise ValueError(f"mode must be {MODE_RAG!r} or {MODE_VANILLA!r}")

        timing: dict[str, float] = {}
        t_total = time.perf_counter()
        contexts: list[RankedContext] = []
        hits_out: list[dict] | None = None
        if mode == MODE_RAG:
            if self.index is None:
                raise EmptyIndexError("rag query issued but no index is loaded")
            t = time.perf_counter()
            query_vec = self.embedder.embed_text(question)
            timing["embed_ms"] = (time.perf_counter() - t) * 1000.0
            t = time.perf_counter()
            raw_hits = self.index.search(
                query_vec,
                k=self.config.index.retrieval_k,
                nprobe=self.config.index.nprobe,
            )
            hits = percentile_filter(raw_hits, self.config.index.percentile_p)
            timing["search_ms"] = (time.perf_counter() - t) * 1000.0
            contexts = [
                RankedContext(chunk_id=h.entry.chunk_id, text=h.entry.text, score=h.score)
                for h in hits
            ]
            hits_out = [
                {"chunk_id": h.entry.chunk_id, "score": h.score, "snippet": h.entry.text}
                for h in hits
            ]

        req = GenerationRequest(
            question=question,
            contexts=contexts,
            system_preamble=self.config.gen.system_preamble,
            sampling_top_p=self.config.gen.sampling_top_p,
            max_context_chars=self.config.gen.max_context_chars,
            model_name=self.config.gen.model_name,
        )
        t = time.perf_counter()
        try:
            result = generate(req, self.provider)
        except (ProviderUnreachableError, ProviderRefusalError) as exc:
            raise type(exc)(f"generate: {exc}") from exc
        timing["generate_ms"] = (time.perf_counter() - t) * 1000.0
        timing["total_ms"] = (time.perf_counter() - t_total) * 1000.0
        return QueryResponse(
            answer=result.answer, mode=mode, hits=hits_out, timing_ms=timing,
        )


def _build_index(config: PipelineConfig, docs, fingerprint: str, embedder) -> VectorIndex:
    clean_docs = _stage(
        "preprocess", lambda: [replace(d, text=preprocess(d.text)) for d in docs]
    )
    chunks = _stage(
        "chunk",
        lambda: [c for d in clean_docs for c in chunk_document(d, config.chunk_policy)],
    )
    logger.info("embedding %d chunks from %d documents", len(chunks), len(clean_docs))
    vectors = _stage("embed", lambda: embedder.embed_batch([c.text for c in chunks]))
    index = VectorIndex(config.index, content_hash=fingerprint)

    def add_all():
        entries = [
            KbEntry(chunk_id=c.chunk_id, doc_id=c.doc_id, vector=v, text=c.text)
            for c, v in zip(chunks, vectors)
        ]
        return index.add(entries)

    added = _stage("index", add_all)
    logger.info("indexed %d unique chunks", added)
    return index


def pipeline_init(config: PipelineConfig, *, force_rebuild: bool = False) -> Pipeline:
    """Prepare a ready pipeline: reuse a current index or build a fresh one.

    With a configured corpus, the index is rebuilt whenever the stored
    content hash disagrees with the current corpus + config (and reused
    otherwise). Without a corpus, an existing index file is required for
    rag mode and opened as-is.
    """
    embedder = make_embedder(config.embedder)
    provider = make_provider(config.gen)
    index_path = Path(config.index_path)

    docs = None
    fingerprint = ""
    if config.corpus_path:
        docs = _stage("load-corpus", lambda: load_corpus(config.corpus_path))
        fingerprint = corpus_fingerprint(docs, config)

    index: VectorIndex | None = None
    if index_path.exists() and not force_rebuild:
        index = _stage("load-index", lambda: VectorIndex.load(index_path))
        if index.config.dim != config.embedder.dim:
            raise DimensionMismatchError(
                f"index {index_path} has dim {index.config.dim}, "
                f"embedder dim is {config.embedder.dim}"
            )
        if docs is not None and index.content_hash != fingerprint:
            logger.info("index %s is stale (content hash changed); rebuilding", index_path)
            index = None
        else:
            logger.info("index cache hit at %s (%d entries); skipping rebuild",
                        index_path, len(index))

    if index is None:
        if docs is None:
            if config.mode == MODE_VANILLA:
                return Pipeline(config, index=None, embedder=embedder, provider=provider)
            raise PipelineInitError(
                f"load-corpus: no corpus configured and no index file at {index_path}"
            )
        index = _build_index(config, docs, fingerprint, embedder)
        _stage("persist", lambda: index.save(index_path))
        logger.info("wrote index %s (%d entries)", index_path, len(index))

    return Pipeline(config, index=index, embedder=embedder, provider=provider)
