"""Corpus normalization and fixed-size overlapping chunking.

Chunk windows are measured in characters, not tokens, so the segmentation
is deterministic and independent of any tokenizer.
"""

from __future__ import annotations

import json
import unicodedata
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyDocumentError

# Horizontal whitespace (anything \s matches except newline).
_HSPACE_RE = re.compile(r"[^\S\n]+")
_NL_SPACE_RE = re.compile(r" *\n *")
_NL_RUN_RE = re.compile(r"\n{3,}")


@dataclass(frozen=True)
class Document:
    """A raw corpus unit. doc_id must be unique within a corpus."""

    doc_id: str
    source: str
    text: str
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")


@dataclass(frozen=True)
class Chunk:
    """A character window of a document; the retrieval unit."""

    chunk_id: str
    doc_id: str
    offset: int
    text: str


@dataclass(frozen=True)
class ChunkPolicy:
    """Window size and overlap, in characters.

    overlap defaults to a tenth of chunk_size (800 -> 80).
    """

    chunk_size: int = 800
    overlap: int | None = None

    def __post_init__(self):
        if self.overlap is None:
            object.__setattr__(self, "overlap", self.chunk_size // 10)
        if self.chunk_size <= 0:
            raise ValueError(f"chunk_size must be positive, got {self.chunk_size}")
        if not 0 <= self.overlap < self.chunk_size:
            raise ValueError(
                f"overlap must satisfy 0 <= overlap < chunk_size, "
                f"got overlap={self.overlap} chunk_size={self.chunk_size}"
            )

    @property
    def stride(self) -> int:
        return self.chunk_size - self.overlap


def preprocess(raw: str) -> str:
    """Normalize raw text: strip control characters, collapse whitespace.

    Rules, in order: CRLF becomes LF; control characters other than newline
    and tab are dropped; runs of horizontal whitespace collapse to one space;
    spaces adjacent to newlines are removed; runs of 3+ newlines collapse to
    2; ends are trimmed; the result is Unicode NFC. Idempotent.

    Raises EmptyDocumentError if nothing remains after cleaning.
    """
    text = raw.replace("\r\n", "\n")
    # Tab survives here so it participates in whitespace collapsing below.
    text = "".join(
        ch for ch in text
        if ch in ("\n", "\t") or unicodedata.category(ch) != "Cc"
    )
    text = _HSPACE_RE.sub(" ", text)
    text = _NL_SPACE_RE.sub("\n", text)
    text = _NL_RUN_RE.sub("\n\n", text)
    text = unicodedata.normalize("NFC", text.strip())
    if not text:
        raise EmptyDocumentError("document is empty after preprocessing")
    return text


def chunk_document(doc: Document, policy: ChunkPolicy) -> list[Chunk]:
    """Segment doc.text into overlapping windows of policy.chunk_size chars.

    Window k covers [k*stride, k*stride + chunk_size) clipped to the text.
    Generation stops after the first window that reaches the end of the
    text, so no window is ever fully contained in its predecessor and every
    character lands in at least one chunk.
    """
    if not doc.text:
        raise ValueError(f"document {doc.doc_id!r} has empty text")
    text = doc.text
    length = len(text)
    chunks: list[Chunk] = []
    offset = 0
    k = 0
    while offset < length:
        end = min(offset + policy.chunk_size, length)
        chunks.append(
            Chunk(
                chunk_id=f"{doc.doc_id}:{k}",
                doc_id=doc.doc_id,
                offset=offset,
                text=text[offset:end],
            )
        )
        if end >= length:
            break
        offset += policy.stride
        k += 1
    return chunks


def load_corpus(path: str | Path) -> list[Document]:
    """Load a corpus from a directory of UTF-8 text files or a JSONL file.

    JSONL lines look like {"doc_id": ..., "source": ..., "text": ...,
    "metadata": {...}}; doc_id and source default to the file stem / line
    number when omitted. Directory mode uses each file's stem as doc_id.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"corpus path not found: {path}")
    docs: list[Document] = []
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.is_file() and p.suffix == ".txt")
        if not files:
            raise FileNotFoundError(f"no .txt files in corpus directory: {path}")
        for f in files:
            docs.append(Document(doc_id=f.stem, source=str(f), text=f.read_text(encoding="utf-8")))
    else:
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh):
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                docs.append(
                    Document(
                        doc_id=str(obj.get("doc_id") or f"{path.stem}-{lineno}"),
                        source=str(obj.get("source") or str(path)),
                        text=obj["text"],
                        metadata={str(k): str(v) for k, v in (obj.get("metadata") or {}).items()},
                    )
                )
        if not docs:
            raise FileNotFoundError(f"no documents in JSONL corpus: {path}")
    seen: set[str] = set()
    for doc in docs:
        if doc.doc_id in seen:
            raise ValueError(f"duplicate doc_id in corpus: {doc.doc_id!r}")
        seen.add(doc.doc_id)
    return docs
