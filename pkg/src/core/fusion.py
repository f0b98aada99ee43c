"""
Lexical + vector score fusion.

Both fusions draw candidates from each side's top-(4k) list and weight the
vector side by `alpha`.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

from src.core.embedding_port import EmbeddingVector
from src.core.index_port import ScoredTool, rank_scores
from src.core.lexical_index import LexicalIndex, lexical_search
from src.core.vector_index import VectorIndex, cosine_scores

CANDIDATE_MULTIPLIER = 4
RRF_K = 60


def min_max_normalize(scores: Mapping[str, float]) -> dict[str, float]:
    """Scale to [0, 1]; a constant side (including a single candidate) maps to 0."""
    if not scores:
        return {}
    low = min(scores.values())
    high = max(scores.values())
    if high - low < 1e-12:
        return dict.fromkeys(scores, 0.0)
    span = high - low
    return {tool_id: (score - low) / span for tool_id, score in scores.items()}


def hybrid_search(
    lex: LexicalIndex,
    vec: VectorIndex,
    query: str,
    qvec: EmbeddingVector,
    k: int,
    alpha: float,
) -> list[ScoredTool]:
    """
    Convex combination of min-max normalised scores.

    A candidate missing from the lexical list scores 0 there. A candidate
    missing from the vector list keeps its exact cosine, so alpha = 1 ranks
    like vector_search even when every cosine is negative.
    fused = alpha * vector + (1 - alpha) * lexical.
    """
    lexical, vector, cosines = _candidates(lex, vec, query, qvec, k, alpha)
    union = [*vector, *(tool_id for tool_id in lexical if tool_id not in vector)]
    lexical_norm = min_max_normalize({tool_id: lexical.get(tool_id, 0.0) for tool_id in union})
    # Ids absent from the vector index score 0
    vector_norm = min_max_normalize({tool_id: cosines.get(tool_id, 0.0) for tool_id in union})
    fused = {
        tool_id: alpha * vector_norm[tool_id] + (1.0 - alpha) * lexical_norm[tool_id]
        for tool_id in union
    }
    return rank_scores(fused, k)


def reciprocal_rank_fusion(
    lex: LexicalIndex,
    vec: VectorIndex,
    query: str,
    qvec: EmbeddingVector,
    k: int,
    alpha: float,
    rrf_k: int = RRF_K,
) -> list[ScoredTool]:
    """Weighted RRF: alpha / (rrf_k + vector rank) + (1 - alpha) / (rrf_k + lexical rank)."""
    lexical, vector, _ = _candidates(lex, vec, query, qvec, k, alpha)
    fused: dict[str, float] = {}
    _accumulate_rrf(fused, list(vector), alpha, rrf_k)
    _accumulate_rrf(fused, list(lexical), 1.0 - alpha, rrf_k)
    return rank_scores(fused, k)


def _candidates(
    lex: LexicalIndex,
    vec: VectorIndex,
    query: str,
    qvec: EmbeddingVector,
    k: int,
    alpha: float,
) -> tuple[dict[str, float], dict[str, float], dict[str, float]]:
    """Lexical top-(4k), vector top-(4k), and the cosine of every indexed tool."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    depth = CANDIDATE_MULTIPLIER * k
    lexical = {hit.tool_id: hit.score for hit in lexical_search(lex, query, depth)}
    cosines = cosine_scores(vec, qvec)
    vector = {hit.tool_id: hit.score for hit in rank_scores(cosines, depth)}
    return lexical, vector, cosines


def _accumulate_rrf(scores: dict[str, float], ranked_ids: Sequence[str], weight: float, rrf_k: int) -> None:
    for rank, tool_id in enumerate(ranked_ids, start=1):
        scores[tool_id] = scores.get(tool_id, 0.0) + weight / (rrf_k + rank)
