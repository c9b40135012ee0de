"""Pipeline configuration: INI file, flag overrides, validated dataclasses.

One human-editable config document with flat sections (ingest, embed, index,
gen, eval, serve). Credentials never live here; they come from environment
variables only. Every field has a default that works offline, so an empty
config runs the deterministic test stack end to end.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .embed import KIND_DETERMINISTIC, KIND_REMOTE, EmbedderSpec
from .evaluate import DEFAULT_OMEGA, JUDGE_EMBEDDING, JUDGE_LLM, JudgeSpec
from .gen import DEFAULT_MAX_CONTEXT_CHARS, DEFAULT_PREAMBLE, DEFAULT_TOP_P
from .ingest import ChunkPolicy
from .kb import IndexConfig

MODE_RAG = "rag"
MODE_VANILLA = "vanilla"

PROVIDER_ECHO = "echo"
PROVIDER_REFUSAL = "refusal"
PROVIDER_REMOTE = "remote"


@dataclass(frozen=True)
class GenDefaults:
    provider: str = PROVIDER_ECHO
    endpoint: str = ""
    model_name: str = "test-model"
    system_preamble: str = DEFAULT_PREAMBLE
    sampling_top_p: float = DEFAULT_TOP_P
    max_context_chars: int = DEFAULT_MAX_CONTEXT_CHARS

    def __post_init__(self):
        if self.provider not in (PROVIDER_ECHO, PROVIDER_REFUSAL, PROVIDER_REMOTE):
            raise ValueError(f"unknown gen provider: {self.provider!r}")
        if self.provider == PROVIDER_REMOTE and not self.endpoint:
            raise ValueError("remote gen provider requires an endpoint")


@dataclass(frozen=True)
class PipelineConfig:
    chunk_policy: ChunkPolicy
    embedder: EmbedderSpec
    index: IndexConfig
    gen: GenDefaults
    judge: JudgeSpec
    omega: float = DEFAULT_OMEGA
    mode: str = MODE_RAG
    corpus_path: str | None = None
    index_path: str = "index.rgf"
    testset_path: str | None = None
    serve_host: str = "127.0.0.1"
    serve_port: int = 8765

    def __post_init__(self):
        if self.mode not in (MODE_RAG, MODE_VANILLA):
            raise ValueError(f"mode must be {MODE_RAG!r} or {MODE_VANILLA!r}")
        if self.embedder.dim != self.index.dim:
            raise ValueError(
                f"embedder dim {self.embedder.dim} != index dim {self.index.dim}"
            )
        if self.embedder.max_input_chars < self.chunk_policy.chunk_size:
            raise ValueError("embedder max_input_chars must cover the chunk size")
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError("omega must be in [0, 1]")


def default_config() -> PipelineConfig:
    embedder = EmbedderSpec()
    return PipelineConfig(
        chunk_policy=ChunkPolicy(),
        embedder=embedder,
        index=IndexConfig(dim=embedder.dim),
        gen=GenDefaults(),
        judge=JudgeSpec(embedder=embedder),
    )


def _merge(parser: configparser.ConfigParser, overrides: dict[str, str] | None) -> None:
    for dotted, value in (overrides or {}).items():
        section, _, key = dotted.partition(".")
        if not section or not key:
            raise ValueError(f"override must look like section.key, got {dotted!r}")
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value)


def load_config(path: str | Path | None = None,
                overrides: dict[str, str] | None = None) -> PipelineConfig:
    """Build a PipelineConfig from an optional INI file plus overrides.

    overrides are dotted "section.key" strings (the CLI's flag values) and
    take precedence over the file. Missing file sections fall back to the
    offline defaults.
    """
    parser = configparser.ConfigParser()
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        parser.read(path, encoding="utf-8")
    _merge(parser, overrides)

    def get(section: str, key: str, fallback: str) -> str:
        return parser.get(section, key, fallback=fallback)

    def getint(section: str, key: str, fallback: int) -> int:
        return parser.getint(section, key, fallback=fallback)

    def getfloat(section: str, key: str, fallback: float) -> float:
        return parser.getfloat(section, key, fallback=fallback)

    chunk_size = getint("ingest", "chunk_size", 800)
    overlap_raw = get("ingest", "overlap", "")
    policy = ChunkPolicy(
        chunk_size=chunk_size,
        overlap=int(overlap_raw) if overlap_raw else None,
    )
    corpus_path = get("ingest", "corpus", "") or None

    embed_kind = get("embed", "kind", KIND_DETERMINISTIC)
    if embed_kind not in (KIND_DETERMINISTIC, KIND_REMOTE):
        raise ValueError(f"unknown embed kind: {embed_kind!r}")
    embedder = EmbedderSpec(
        kind=embed_kind,
        endpoint=get("embed", "endpoint", ""),
        model_name=get("embed", "model_name", "gte-test"),
        dim=getint("embed", "dim", 256),
        max_input_chars=getint("embed", "max_input_chars", 8192 * 4),
        batch_size=getint("embed", "batch_size", 64),
    )

    index = IndexConfig(
        dim=getint("index", "dim", embedder.dim),
        mode=get("index", "mode", "flat"),
        num_clusters=getint("index", "num_clusters", 0),
        nprobe=getint("index", "nprobe", 8),
        retrieval_k=getint("index", "retrieval_k", 20),
        percentile_p=getint("index", "percentile_p", 95),
    )
    index_path = get("index", "path", "index.rgf")

    gen = GenDefaults(
        provider=get("gen", "provider", PROVIDER_ECHO),
        endpoint=get("gen", "endpoint", ""),
        model_name=get("gen", "model_name", "test-model"),
        system_preamble=get("gen", "system_preamble", DEFAULT_PREAMBLE),
        sampling_top_p=getfloat("gen", "sampling_top_p", DEFAULT_TOP_P),
        max_context_chars=getint("gen", "max_context_chars", DEFAULT_MAX_CONTEXT_CHARS),
    )

    judge_kind = get("eval", "judge", "embedding")
    judge_kind = {
        "embedding": JUDGE_EMBEDDING,
        "llm": JUDGE_LLM,
        JUDGE_EMBEDDING: JUDGE_EMBEDDING,
        JUDGE_LLM: JUDGE_LLM,
    }.get(judge_kind)
    if judge_kind is None:
        raise ValueError(f"unknown judge kind: {get('eval', 'judge', '')!r}")
    judge = JudgeSpec(
        kind=judge_kind,
        tau=getfloat("eval", "tau", 0.8),
        embedder=embedder,
    )

    return PipelineConfig(
        chunk_policy=policy,
        embedder=embedder,
        index=index,
        gen=gen,
        judge=judge,
        omega=getfloat("eval", "omega", DEFAULT_OMEGA),
        mode=get("gen", "mode", MODE_RAG),
        corpus_path=corpus_path,
        index_path=index_path,
        testset_path=get("eval", "testset", "") or None,
        serve_host=get("serve", "host", "127.0.0.1"),
        serve_port=getint("serve", "port", 8765),
    )


def public_config_dict(config: PipelineConfig) -> dict:
    """Effective config for the /config endpoint; contains no secrets."""
    return {
        "ingest": {
            "chunk_size": config.chunk_policy.chunk_size,
            "overlap": config.chunk_policy.overlap,
            "corpus": config.corpus_path,
        },
        "embed": {
            "kind": config.embedder.kind,
            "model_name": config.embedder.model_name,
            "dim": config.embedder.dim,
            "max_input_chars": config.embedder.max_input_chars,
            "batch_size": config.embedder.batch_size,
        },
        "index": {
            "mode": config.index.mode,
            "num_clusters": config.index.num_clusters,
            "nprobe": config.index.nprobe,
            "retrieval_k": config.index.retrieval_k,
            "percentile_p": config.index.percentile_p,
            "path": config.index_path,
        },
        "gen": {
            "provider": config.gen.provider,
            "model_name": config.gen.model_name,
            "sampling_top_p": config.gen.sampling_top_p,
            "max_context_chars": config.gen.max_context_chars,
            "mode": config.mode,
        },
        "eval": {
            "judge": config.judge.kind,
            "tau": config.judge.tau,
            "omega": config.omega,
            "testset": config.testset_path,
        },
        "serve": {
            "host": config.serve_host,
            "port": config.serve_port,
        },
    }
