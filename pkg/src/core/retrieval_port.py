"""Typed port contract for the retrieval engine and its rerank hooks."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal, Protocol, runtime_checkable

from src.core.index_port import ScoredTool
from src.core.tool_graph import ToolNode

RetrievalMode = Literal["lexical", "vector", "hybrid", "graph_fusion"]
FirstPass = Literal["lexical", "vector", "hybrid"]
FusionMethod = Literal["score", "rank"]
Provenance = Literal["vector_seed", "dependency"]

RETRIEVAL_MODES: tuple[RetrievalMode, ...] = ("lexical", "vector", "hybrid", "graph_fusion")
FIRST_PASS_MODES: tuple[FirstPass, ...] = ("lexical", "vector", "hybrid")
FUSION_METHODS: tuple[FusionMethod, ...] = ("score", "rank")


class RetrievalError(RuntimeError):
    """Base error for retrieval."""


class RetrievalConfigError(RetrievalError, ValueError):
    """Raised for invalid settings or an unknown hook name."""


class RerankerTransportError(RetrievalError):
    """Raised when the reranker endpoint times out, refuses, or answers non-2xx."""

    def __init__(self, message: str, *, status: int | None = None) -> None:
        super().__init__(message)
        self.status = status


class RerankerResponseError(RetrievalError):
    """Raised when a reranker reply cannot be parsed into tool names."""


@dataclass(frozen=True)
class RetrievalConfig:
    mode: RetrievalMode = "graph_fusion"
    top_k: int = 3
    rerank_top_k: int | None = None
    final_top_k: int = 30
    d_limit: int = 10
    alpha: float = 0.8
    query_transform: str | None = None
    reranker: str | None = None
    # First-pass search used by graph_fusion
    first_pass: FirstPass = "hybrid"
    fusion: FusionMethod = "score"

    def __post_init__(self) -> None:
        if self.mode not in RETRIEVAL_MODES:
            raise RetrievalConfigError(f"mode must be one of {', '.join(RETRIEVAL_MODES)}, got {self.mode!r}")
        if self.first_pass not in FIRST_PASS_MODES:
            raise RetrievalConfigError(
                f"first_pass must be one of {', '.join(FIRST_PASS_MODES)}, got {self.first_pass!r}"
            )
        if self.fusion not in FUSION_METHODS:
            raise RetrievalConfigError(f"fusion must be 'score' or 'rank', got {self.fusion!r}")
        if self.top_k < 1:
            raise RetrievalConfigError(f"top_k must be >= 1, got {self.top_k}")
        if self.final_top_k < 1:
            raise RetrievalConfigError(f"final_top_k must be >= 1, got {self.final_top_k}")
        if self.d_limit < 0:
            raise RetrievalConfigError(f"d_limit must be >= 0, got {self.d_limit}")
        if not 0.0 <= self.alpha <= 1.0:
            raise RetrievalConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.rerank_top_k is not None and not 1 <= self.rerank_top_k <= self.top_k:
            raise RetrievalConfigError(
                f"rerank_top_k must be in [1, top_k={self.top_k}], got {self.rerank_top_k}"
            )

    @property
    def expands_graph(self) -> bool:
        return self.mode == "graph_fusion"

    @property
    def search_mode(self) -> FirstPass:
        """First-pass search actually run for this mode."""
        return self.first_pass if self.mode == "graph_fusion" else self.mode  # type: ignore[return-value]

    @property
    def effective_rerank_top_k(self) -> int:
        return self.rerank_top_k if self.rerank_top_k is not None else self.top_k


@dataclass(frozen=True)
class RankedEntry:
    tool_id: str
    provenance: Provenance
    # Seed that contributed this entry; a seed's own entry points at itself
    seed_id: str


@dataclass(frozen=True)
class RankedToolList:
    entries: tuple[RankedEntry, ...] = ()
    truncated: bool = False
    first_pass: tuple[ScoredTool, ...] = ()
    seeds: tuple[str, ...] = ()
    rerank_degraded: bool = False
    warnings: tuple[str, ...] = ()

    @property
    def tool_ids(self) -> list[str]:
        return [entry.tool_id for entry in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class RerankOutcome:
    order: tuple[str, ...]
    degraded: bool = False
    warning: str | None = None


@runtime_checkable
class Reranker(Protocol):
    """
    Reorders candidate tools for a query and returns tool ids.

    Implementations may return unknown, duplicate or missing ids; the caller
    repairs the order. `golden` is only populated in evaluation runs.
    """

    def reorder(
        self,
        query: str,
        candidates: Sequence[ToolNode],
        golden: frozenset[str] | None = None,
    ) -> Sequence[str]: ...
