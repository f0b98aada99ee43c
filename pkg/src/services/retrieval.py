"""
Retrieval service: first-pass search, optional rerank, then dependency
expansion of each seed over the tool graph into one final top-K list.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import lru_cache

from src.adapters.llm_reranker_client import LLMRerankerClient
from src.adapters.text import render_tool_document
from src.config import (
    RERANKER_API_KEY,
    RERANKER_API_URL,
    RERANKER_MAX_CONCURRENCY,
    RERANKER_MODEL,
    RERANKER_TIMEOUT_SEC,
)
from src.core.embedding_port import EmbeddingProvider, EmbeddingVector
from src.core.fusion import hybrid_search, reciprocal_rank_fusion
from src.core.hook_registry import lookup_query_transform, lookup_reranker
from src.core.index_port import ScoredTool
from src.core.lexical_index import LexicalIndex, build_lexical_index, lexical_search
from src.core.rerankers import IdentityReranker, OracleReranker, repair_order
from src.core.retrieval_port import (
    RankedEntry,
    RankedToolList,
    Reranker,
    RerankerResponseError,
    RerankerTransportError,
    RerankOutcome,
    RetrievalConfig,
    RetrievalConfigError,
)
from src.core.tool_graph import ToolKnowledgeGraph, dependencies_dfs
from src.core.vector_index import VectorIndex, build_vector_index, vector_search

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RetrievalCorpus:
    """Graph plus both indexes, all over the same tool ids."""

    graph: ToolKnowledgeGraph
    lexical: LexicalIndex
    vectors: VectorIndex
    provider: EmbeddingProvider

    def __post_init__(self) -> None:
        graph_ids = set(self.graph.nodes)
        if set(self.lexical.doc_lengths) != graph_ids or set(self.vectors.ids) != graph_ids:
            raise ValueError("graph, lexical index and vector index must cover the same tool ids")

    def __len__(self) -> int:
        return len(self.graph)


def build_corpus(
    graph: ToolKnowledgeGraph,
    provider: EmbeddingProvider,
    lexical: LexicalIndex | None = None,
) -> RetrievalCorpus:
    """Render, index and embed every tool in `graph`."""
    documents = [render_tool_document(node) for node in graph.nodes.values()]
    vectors = embed_texts(provider, [doc.text for doc in documents])
    corpus = RetrievalCorpus(
        graph=graph,
        lexical=lexical if lexical is not None else build_lexical_index(documents),
        vectors=build_vector_index(zip([doc.tool_id for doc in documents], vectors, strict=True)),
        provider=provider,
    )
    logger.info(f"📋 Built retrieval corpus over {len(corpus)} tools ({provider.name}/{provider.model})")
    return corpus


def embed_texts(provider: EmbeddingProvider, texts: Sequence[str]) -> list[EmbeddingVector]:
    """Embed in order, asking the provider once per distinct text."""
    batch = getattr(provider, "embed_many", None)
    if callable(batch):
        return list(batch(texts))
    unique: dict[str, EmbeddingVector] = {}
    for text in texts:
        if text not in unique:
            unique[text] = provider.embed(text)
    return [unique[text] for text in texts]


@lru_cache(maxsize=1)
def default_rerankers() -> Mapping[str, Reranker]:
    """Hook alias -> implementation; the LLM client reads RERANKER_* settings."""
    return {
        "identity": IdentityReranker(),
        "oracle": OracleReranker(),
        "llm": LLMRerankerClient(
            RERANKER_API_URL,
            model=RERANKER_MODEL,
            api_key=RERANKER_API_KEY,
            timeout_seconds=RERANKER_TIMEOUT_SEC,
            max_concurrency=RERANKER_MAX_CONCURRENCY,
        ),
    }


def first_pass(corpus: RetrievalCorpus, query: str, cfg: RetrievalConfig, k: int) -> list[ScoredTool]:
    mode = cfg.search_mode
    if mode == "lexical":
        return lexical_search(corpus.lexical, query, k)
    qvec = corpus.provider.embed(query)
    if mode == "vector":
        return vector_search(corpus.vectors, qvec, k)
    fuse = hybrid_search if cfg.fusion == "score" else reciprocal_rank_fusion
    return fuse(corpus.lexical, corpus.vectors, query, qvec, k, cfg.alpha)


def rerank(
    query: str,
    candidates: Sequence[str],
    hook: Reranker,
    graph: ToolKnowledgeGraph,
    rerank_top_k: int | None = None,
    golden: frozenset[str] | None = None,
) -> RerankOutcome:
    """
    Permute the first `rerank_top_k` candidates with `hook`; the rest keep their order.

    A hook that fails in transport or returns an unreadable reply leaves the
    order unchanged and marks the outcome degraded.
    """
    head_size = len(candidates) if rerank_top_k is None else min(rerank_top_k, len(candidates))
    head, tail = list(candidates[:head_size]), list(candidates[head_size:])
    if not head:
        return RerankOutcome(order=tuple(candidates))
    try:
        proposed = hook.reorder(query, [graph.node(tool_id) for tool_id in head], golden)
    except (RerankerTransportError, RerankerResponseError) as exc:
        logger.warning(f"⚠️  Reranker failed, keeping first-pass order: {exc}")
        return RerankOutcome(order=tuple(candidates), degraded=True, warning=f"rerank degraded: {exc}")
    return RerankOutcome(order=tuple(repair_order(head, proposed) + tail))


def assemble(
    graph: ToolKnowledgeGraph, seeds: Sequence[str], d_limit: int, final_top_k: int
) -> tuple[list[RankedEntry], bool]:
    """
    Each seed (if unseen) followed by its unseen DFS dependencies, capped at
    `final_top_k`. Returns the entries and whether anything was cut.
    """
    entries: list[RankedEntry] = []
    seen: set[str] = set()

    def add(tool_id: str, entry: RankedEntry) -> bool:
        if tool_id in seen:
            return True
        if len(entries) == final_top_k:
            return False
        seen.add(tool_id)
        entries.append(entry)
        return True

    for seed in seeds:
        if not add(seed, RankedEntry(seed, "vector_seed", seed)):
            return entries, True
        for dependency in dependencies_dfs(graph, seed, d_limit):
            if not add(dependency, RankedEntry(dependency, "dependency", seed)):
                return entries, True
    return entries, False


def retrieve(
    query: str,
    cfg: RetrievalConfig,
    corpus: RetrievalCorpus,
    golden: frozenset[str] | None = None,
    rerankers: Mapping[str, Reranker] | None = None,
) -> RankedToolList:
    """
    Run one query through the configured pipeline.

    Baseline modes (lexical, vector, hybrid) return the first pass cut to
    final_top_k; graph_fusion expands the top_k seeds through the graph.
    """
    transform = lookup_query_transform(cfg.query_transform or "identity").apply
    hook = _resolve_reranker(cfg.reranker, rerankers, golden)
    if len(corpus) == 0:
        return RankedToolList()

    text = transform(query)
    if cfg.expands_graph:
        hits = first_pass(corpus, text, cfg, cfg.top_k)
    else:
        hits = first_pass(corpus, text, cfg, cfg.final_top_k + 1)

    ranked = [hit.tool_id for hit in hits]
    outcome = RerankOutcome(order=tuple(ranked))
    if hook is not None:
        outcome = rerank(text, ranked, hook, corpus.graph, cfg.effective_rerank_top_k, golden)
    warnings = (outcome.warning,) if outcome.warning else ()

    if cfg.expands_graph:
        seeds = outcome.order
        entries, truncated = assemble(corpus.graph, seeds, cfg.d_limit, cfg.final_top_k)
    else:
        seeds = outcome.order[: cfg.top_k]
        truncated = len(outcome.order) > cfg.final_top_k
        entries = [
            RankedEntry(tool_id, "vector_seed", tool_id) for tool_id in outcome.order[: cfg.final_top_k]
        ]
        hits = hits[: cfg.final_top_k]

    logger.debug(
        f"Retrieved {len(entries)} tools for {query!r} (mode={cfg.mode}, seeds={list(seeds)}, truncated={truncated})"
    )
    return RankedToolList(
        entries=tuple(entries),
        truncated=truncated,
        first_pass=tuple(hits),
        seeds=tuple(seeds),
        rerank_degraded=outcome.degraded,
        warnings=warnings,
    )


def _resolve_reranker(
    alias: str | None, rerankers: Mapping[str, Reranker] | None, golden: frozenset[str] | None
) -> Reranker | None:
    if alias is None:
        return None
    if lookup_reranker(alias).needs_golden and golden is None:
        raise RetrievalConfigError(f"reranker '{alias}' needs golden tools; use it only in evaluation runs")
    hooks = rerankers if rerankers is not None else default_rerankers()
    if alias not in hooks:
        raise RetrievalConfigError(f"No implementation registered for reranker '{alias}'")
    return hooks[alias]
