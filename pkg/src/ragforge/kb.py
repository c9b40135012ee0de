"""Persistent vector knowledge base with exact cosine search.

Flat mode scans every entry; clustered mode restricts the exact scan to the
nprobe nearest k-means cells, trading recall for speed. Scores are cosine
similarities, which reduce to dot products because all stored vectors are
unit-norm. Ties break by insertion order so searches are reproducible.

Index files use a small binary format: magic "RGF1", a u16 format version,
a CRC-32 over the payload, the index config block, little-endian float32
vectors, and length-prefixed UTF-8 chunk texts.
"""

from __future__ import annotations

import hashlib
import math
import os
import struct
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embed import EmbeddingVector
from .errors import (
    ChecksumError,
    DimensionMismatchError,
    DuplicateChunkIdError,
    EmptyIndexError,
    IndexFormatError,
    VersionMismatchError,
)

MODE_FLAT = "flat"
MODE_CLUSTERED = "clustered"

_MAGIC = b"RGF1"
_FORMAT_VERSION = 1

_KMEANS_SEED = 0x5EED
_KMEANS_MAX_ITER = 25


@dataclass(frozen=True)
class IndexConfig:
    dim: int
    mode: str = MODE_FLAT
    num_clusters: int = 0  # 0 = auto: ceil(sqrt(n)) at build time
    nprobe: int = 8
    retrieval_k: int = 20
    percentile_p: int = 95

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        if self.mode not in (MODE_FLAT, MODE_CLUSTERED):
            raise ValueError(f"unknown index mode: {self.mode!r}")
        if self.num_clusters < 0:
            raise ValueError("num_clusters must be >= 0 (0 = auto)")
        if self.nprobe < 1:
            raise ValueError("nprobe must be >= 1")
        if self.num_clusters and self.nprobe > self.num_clusters:
            raise ValueError("nprobe must not exceed num_clusters")
        if self.retrieval_k < 1:
            raise ValueError("retrieval_k must be >= 1")
        if not 0 < self.percentile_p <= 100:
            raise ValueError("percentile_p must be in (0, 100]")


@dataclass(eq=False)
class KbEntry:
    chunk_id: str
    doc_id: str
    vector: EmbeddingVector
    text: str


@dataclass(frozen=True)
class ScoredHit:
    entry: KbEntry
    score: float


def _text_key(text: str) -> bytes:
    return hashlib.blake2b(text.encode("utf-8"), digest_size=16).digest()


def _kmeans(data: np.ndarray, k: int, seed: int = _KMEANS_SEED,
            max_iter: int = _KMEANS_MAX_ITER) -> tuple[np.ndarray, np.ndarray]:
    """Seeded k-means++ returning (centroids, labels). Fully deterministic."""
    n = data.shape[0]
    rng = np.random.default_rng(seed)
    centroids = np.empty((k, data.shape[1]), dtype=np.float64)
    centroids[0] = data[int(rng.integers(n))]
    d2 = np.sum((data - centroids[0]) ** 2, axis=1)
    for i in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            # All points coincide with chosen centroids; fall back to uniform.
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centroids[i] = data[idx]
        d2 = np.minimum(d2, np.sum((data - centroids[i]) ** 2, axis=1))

    x2 = np.sum(data ** 2, axis=1)[:, None]
    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iter):
        c2 = np.sum(centroids ** 2, axis=1)[None, :]
        dists = x2 + c2 - 2.0 * (data @ centroids.T)
        new_labels = np.argmin(dists, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        min_dists = np.min(dists, axis=1)
        # Points worst served by their centroid, for re-seeding empty cells.
        refill = iter(np.argsort(-min_dists, kind="stable"))
        for c in range(k):
            members = labels == c
            if members.any():
                centroids[c] = data[members].mean(axis=0)
            else:
                centroids[c] = data[next(refill)]
    return centroids, labels


class VectorIndex:
    """Single-writer, many-reader vector store.

    kb_add and kb_save take the writer lock; searches read immutable
    numpy snapshots and may run concurrently.
    """

    def __init__(self, config: IndexConfig, content_hash: str = ""):
        self.config = config
        self.content_hash = content_hash
        self._entries: list[KbEntry] = []
        self._rows: list[np.ndarray] = []
        self._matrix: np.ndarray | None = None
        self._text_keys: set[bytes] = set()
        self._key_by_id: dict[str, bytes] = {}
        self._centroids: np.ndarray | None = None
        self._cluster_members: list[np.ndarray] | None = None
        self._lock = threading.RLock()

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> list[KbEntry]:
        return list(self._entries)

    def add(self, entries: list[KbEntry]) -> int:
        """Append entries; exact-duplicate texts are silently dropped.

        Returns the number actually added. A chunk_id resubmitted with
        different text signals a corpus inconsistency and raises.
        """
        with self._lock:
            added = 0
            for entry in entries:
                if entry.vector.dim != self.config.dim:
                    raise DimensionMismatchError(
                        f"entry {entry.chunk_id!r} has dim {entry.vector.dim}, "
                        f"index dim is {self.config.dim}"
                    )
                key = _text_key(entry.text)
                known = self._key_by_id.get(entry.chunk_id)
                if known is not None:
                    if known != key:
                        raise DuplicateChunkIdError(
                            f"chunk_id {entry.chunk_id!r} resubmitted with different text"
                        )
                    continue
                if key in self._text_keys:
                    continue
                self._entries.append(entry)
                self._rows.append(entry.vector.values.astype(np.float32))
                self._text_keys.add(key)
                self._key_by_id[entry.chunk_id] = key
                added += 1
            if added:
                self._matrix = None
                self._centroids = None
                self._cluster_members = None
            return added

    def _get_matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = np.vstack(self._rows).astype(np.float32) if self._rows else \
                np.empty((0, self.config.dim), dtype=np.float32)
        return self._matrix

    def _ensure_clusters(self) -> None:
        if self._centroids is not None:
            return
        matrix = self._get_matrix()
        n = matrix.shape[0]
        k = self.config.num_clusters or math.ceil(math.sqrt(n))
        k = max(1, min(k, n))
        centroids, labels = _kmeans(matrix.astype(np.float64), k)
        self._centroids = centroids
        self._cluster_members = [np.nonzero(labels == c)[0] for c in range(k)]

    def _candidates(self, query: np.ndarray, nprobe: int) -> np.ndarray:
        """Ascending entry indices from the nprobe nearest clusters."""
        self._ensure_clusters()
        assert self._centroids is not None and self._cluster_members is not None
        diffs = self._centroids - query[None, :]
        dists = np.sum(diffs * diffs, axis=1)
        order = np.argsort(dists, kind="stable")
        probe = order[: min(nprobe, len(order))]
        picked = [self._cluster_members[c] for c in probe]
        if not picked:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate(picked))

    def search(self, query: EmbeddingVector, k: int, *, nprobe: int | None = None) -> list[ScoredHit]:
        """Exact top-k by cosine over all entries (flat) or probed cells.

        Hits are sorted by score descending, ties broken by insertion order.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        if query.dim != self.config.dim:
            raise DimensionMismatchError(
                f"query dim {query.dim} != index dim {self.config.dim}"
            )
        if not self._entries:
            raise EmptyIndexError("search on empty index")
        matrix = self._get_matrix()
        if self.config.mode == MODE_FLAT:
            cand = np.arange(matrix.shape[0], dtype=np.int64)
        else:
            cand = self._candidates(query.values, nprobe or self.config.nprobe)
            if cand.size == 0:
                return []
        # Same scoring path for both modes: gather rows, then one matmul.
        scores = matrix[cand] @ query.values
        order = np.argsort(-scores, kind="stable")[:k]
        return [
            ScoredHit(entry=self._entries[int(cand[i])], score=float(scores[i]))
            for i in order
        ]

    def save(self, path: str | Path) -> None:
        """Write the index atomically (temp file + rename)."""
        path = Path(path)
        with self._lock:
            payload = self._encode_payload()
        header = _MAGIC + struct.pack("<HIQ", _FORMAT_VERSION, zlib.crc32(payload), len(payload))
        tmp = path.with_name(path.name + ".tmp")
        try:
            tmp.write_bytes(header + payload)
            os.replace(tmp, path)
        finally:
            if tmp.exists():
                tmp.unlink()

    def _encode_payload(self) -> bytes:
        buf = bytearray()
        _pack_str(buf, self.content_hash)
        buf += struct.pack(
            "<IBIIII",
            self.config.dim,
            0 if self.config.mode == MODE_FLAT else 1,
            self.config.num_clusters,
            self.config.nprobe,
            self.config.retrieval_k,
            self.config.percentile_p,
        )
        buf += struct.pack("<Q", len(self._entries))
        matrix = self._get_matrix()
        for i, entry in enumerate(self._entries):
            _pack_str(buf, entry.chunk_id)
            _pack_str(buf, entry.doc_id)
            _pack_str(buf, entry.text)
            buf += matrix[i].astype("<f4").tobytes()
        return bytes(buf)

    @classmethod
    def load(cls, path: str | Path) -> "VectorIndex":
        data = Path(path).read_bytes()
        if len(data) < 18 or data[:4] != _MAGIC:
            raise IndexFormatError(f"{path}: not a knowledge-base index file")
        version, crc, length = struct.unpack("<HIQ", data[4:18])
        if version != _FORMAT_VERSION:
            raise VersionMismatchError(
                f"{path}: format version {version}, expected {_FORMAT_VERSION}"
            )
        payload = data[18:]
        if len(payload) != length:
            raise ChecksumError(f"{path}: truncated payload ({len(payload)} of {length} bytes)")
        if zlib.crc32(payload) != crc:
            raise ChecksumError(f"{path}: payload checksum mismatch")
        cursor = _Cursor(payload)
        content_hash = cursor.read_str()
        dim, mode_byte, num_clusters, nprobe, retrieval_k, percentile_p = cursor.unpack("<IBIIII")
        config = IndexConfig(
            dim=dim,
            mode=MODE_FLAT if mode_byte == 0 else MODE_CLUSTERED,
            num_clusters=num_clusters,
            nprobe=nprobe,
            retrieval_k=retrieval_k,
            percentile_p=percentile_p,
        )
        index = cls(config, content_hash=content_hash)
        (n_entries,) = cursor.unpack("<Q")
        vec_bytes = 4 * dim
        for _ in range(n_entries):
            chunk_id = cursor.read_str()
            doc_id = cursor.read_str()
            text = cursor.read_str()
            row = np.frombuffer(cursor.read(vec_bytes), dtype="<f4").astype(np.float32)
            vector = EmbeddingVector(values=row.astype(np.float64), dim=dim)
            entry = KbEntry(chunk_id=chunk_id, doc_id=doc_id, vector=vector, text=text)
            index._entries.append(entry)
            index._rows.append(row)
            key = _text_key(text)
            index._text_keys.add(key)
            index._key_by_id[chunk_id] = key
        if cursor.remaining():
            raise ChecksumError(f"{path}: trailing bytes after last entry")
        return index


def _pack_str(buf: bytearray, s: str) -> None:
    raw = s.encode("utf-8")
    buf += struct.pack("<I", len(raw))
    buf += raw


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def read(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ChecksumError("payload ended mid-record")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.read(struct.calcsize(fmt)))

    def read_str(self) -> str:
        (n,) = self.unpack("<I")
        return self.read(n).decode("utf-8")

    def remaining(self) -> int:
        return len(self.data) - self.pos


def percentile_filter(hits: list[ScoredHit], p: int) -> list[ScoredHit]:
    """Keep the top ceil(p/100 * m) hits of a score-descending list."""
    if not 0 < p <= 100:
        raise ValueError("p must be in (0, 100]")
    if not hits:
        return []
    keep = (p * len(hits) + 99) // 100
    return hits[:keep]


# Operation-style aliases matching the module contract.
def kb_add(index: VectorIndex, entries: list[KbEntry]) -> int:
    return index.add(entries)


def kb_search(index: VectorIndex, query: EmbeddingVector, k: int) -> list[ScoredHit]:
    return index.search(query, k)


def kb_save(index: VectorIndex, path: str | Path) -> None:
    index.save(path)


def kb_load(path: str | Path) -> VectorIndex:
    return VectorIndex.load(path)
