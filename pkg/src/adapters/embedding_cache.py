"""File-backed, append-only embedding cache."""

from __future__ import annotations

import hashlib
import logging
import threading
from collections.abc import Iterable
from pathlib import Path

from src.core.embedding_port import (
    EmbeddingCacheMissError,
    EmbeddingDimensionError,
    EmbeddingProvider,
    EmbeddingVector,
)

logger = logging.getLogger(__name__)

_FIELD_SEPARATOR = "\t"
_RECORD_FIELDS = 3


def cache_key(provider: str, model: str, text: str) -> str:
    """Content hash of (provider, model, text); distinct models never collide."""
    payload = "\x1f".join((provider, model, text)).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def format_record(key: str, vector: EmbeddingVector) -> str:
    values = " ".join(repr(v) for v in vector.values)
    return f"{key}{_FIELD_SEPARATOR}{vector.dimension}{_FIELD_SEPARATOR}{values}\n"


def parse_record(line: str) -> tuple[str, EmbeddingVector]:
    """Parse one `key<TAB>dimension<TAB>values` record."""
    parts = line.rstrip("\n").split(_FIELD_SEPARATOR)
    if len(parts) != _RECORD_FIELDS:
        raise ValueError(f"expected {_RECORD_FIELDS} tab-separated fields, got {len(parts)}")
    key, dimension_text, values_text = parts
    vector = EmbeddingVector.of([float(v) for v in values_text.split()])
    if vector.dimension != int(dimension_text):
        raise ValueError(
            f"record declares dimension {dimension_text} but holds {vector.dimension} values"
        )
    return key, vector


class EmbeddingCache:
    """
    Embedding provider backed by an append-only record file.

    Reads are lock-free; writes are serialised. In offline mode, or without an
    inner provider, a miss raises EmbeddingCacheMissError instead of calling out.
    """

    def __init__(
        self,
        path: Path,
        *,
        source: str,
        model: str,
        inner: EmbeddingProvider | None = None,
        offline: bool = False,
    ) -> None:
        self.path = path
        self._source = source
        self._model = model
        self._inner = inner
        self._offline = offline
        self._write_lock = threading.Lock()
        self._vectors: dict[str, EmbeddingVector] = {}
        self._dimension: int | None = None
        self._load()

    @property
    def name(self) -> str:
        return "cache"

    @property
    def model(self) -> str:
        return self._model

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, text: object) -> bool:
        return isinstance(text, str) and self.key_for(text) in self._vectors

    def key_for(self, text: str) -> str:
        return cache_key(self._source, self._model, text)

    def embed(self, text: str) -> EmbeddingVector:
        key = self.key_for(text)
        cached = self._vectors.get(key)
        if cached is not None:
            return cached
        if self._offline or self._inner is None:
            raise EmbeddingCacheMissError(
                f"no cached embedding for text (key {key[:12]}…) in {self.path}"
            )
        vector = self._inner.embed(text)
        self.put(text, vector)
        return vector

    def put(self, text: str, vector: EmbeddingVector) -> None:
        self.put_many([(text, vector)])

    def put_many(self, items: Iterable[tuple[str, EmbeddingVector]]) -> None:
        with self._write_lock:
            records: list[str] = []
            for text, vector in items:
                key = self.key_for(text)
                if key in self._vectors:
                    continue
                self._check_dimension(vector)
                self._vectors[key] = vector
                records.append(format_record(key, vector))
            if not records:
                return
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.writelines(records)

    def _check_dimension(self, vector: EmbeddingVector) -> None:
        if self._dimension is None:
            self._dimension = vector.dimension
        elif vector.dimension != self._dimension:
            raise EmbeddingDimensionError(
                f"cache holds dimension {self._dimension}, got {vector.dimension}"
            )

    def _load(self) -> None:
        if not self.path.exists():
            return
        with self.path.open(encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    key, vector = parse_record(line)
                except ValueError as exc:
                    logger.warning(f"⚠️  Skipping corrupt cache record {self.path}:{line_number}: {exc}")
                    continue
                self._check_dimension(vector)
                self._vectors[key] = vector
        logger.debug(f"Loaded {len(self._vectors)} cached embeddings from {self.path}")
