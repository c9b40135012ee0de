"""Retrieval-augmented question answering over document corpora.

Pipeline: normalize and chunk documents, embed the chunks, store them in a
persistent vector index, retrieve by cosine similarity with percentile
filtering, and hand ranked contexts to a chat-completion provider. An
evaluation harness scores answers on relevancy, recall, correctness, and
faithfulness. Everything runs offline with the deterministic embedder and
canned providers; remote OpenAI-compatible services plug in via config.
"""

from .config import PipelineConfig, default_config, load_config
from .embed import EmbedderSpec, EmbeddingVector, cosine, make_embedder
from .errors import RagforgeError
from .evaluate import (
    EvalReport,
    JudgeSpec,
    TestCase,
    answer_relevancy,
    classify_statements,
    context_recall,
    correctness,
    factual_f,
    faithfulness,
    run_eval,
    split_statements,
)
from .gen import GenerationRequest, GenerationResult, build_prompt, generate
from .ingest import Chunk, ChunkPolicy, Document, chunk_document, load_corpus, preprocess
from .kb import IndexConfig, KbEntry, ScoredHit, VectorIndex, percentile_filter
from .pipeline import Pipeline, QueryResponse, pipeline_init
from .server import make_server, serve

__version__ = "0.1.0"

__all__ = [
    "Chunk",
    "ChunkPolicy",
    "Document",
    "EmbedderSpec",
    "EmbeddingVector",
    "EvalReport",
    "GenerationRequest",
    "GenerationResult",
    "IndexConfig",
    "JudgeSpec",
    "KbEntry",
    "Pipeline",
    "PipelineConfig",
    "QueryResponse",
    "RagforgeError",
    "ScoredHit",
    "TestCase",
    "VectorIndex",
    "answer_relevancy",
    "build_prompt",
    "chunk_document",
    "classify_statements",
    "context_recall",
    "correctness",
    "cosine",
    "default_config",
    "factual_f",
    "faithfulness",
    "generate",
    "load_config",
    "load_corpus",
    "make_embedder",
    "make_server",
    "percentile_filter",
    "pipeline_init",
    "preprocess",
    "run_eval",
    "serve",
    "split_statements",
    "__version__",
]
