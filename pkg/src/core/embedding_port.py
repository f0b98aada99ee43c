"""Typed port contract for embedding providers."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, runtime_checkable


class EmbeddingError(RuntimeError):
    """Base error for embedding providers."""


class EmbeddingTransportError(EmbeddingError):
    """Raised when the remote embeddings API times out or answers non-2xx."""

    def __init__(
        self,
        message: str,
        *,
        status: int | None = None,
        retry_after: float | None = None,
    ) -> None:
        super().__init__(message)
        self.status = status
        self.retry_after = retry_after


class EmbeddingCacheMissError(EmbeddingError):
    """Raised by an offline cache when no vector is stored for a text."""


class EmbeddingDimensionError(EmbeddingError, ValueError):
    """Raised when vectors of different dimensions meet."""


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("Embedding vector must have dimension > 0")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("Embedding vector must be finite-valued")

    @classmethod
    def of(cls, values: Sequence[float]) -> EmbeddingVector:
        return cls(values=tuple(float(v) for v in values))

    @property
    def dimension(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ToolDocument:
    tool_id: str
    text: str


@dataclass(frozen=True)
class ProviderConfig:
    provider: str
    model: str
    dimension: int = 256
    cache_path: Path | None = None
    # Provider whose vectors the cache holds; part of the cache key
    cache_source: str = "remote"
    offline: bool = False
    api_url: str = ""
    api_key: str = ""
    timeout_seconds: float = 30.0

    def __post_init__(self) -> None:
        if self.dimension <= 0:
            raise ValueError(f"Embedding dimension must be > 0, got {self.dimension}")


@runtime_checkable
class EmbeddingProvider(Protocol):
    """Anything that turns text into a fixed-dimension vector."""

    @property
    def name(self) -> str: ...

    @property
    def model(self) -> str: ...

    def embed(self, text: str) -> EmbeddingVector: ...
