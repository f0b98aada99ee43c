"""
Binary-relevance ranking metrics at a cutoff.

A tool counts as relevant the first time it appears in the ranking; repeats
earn nothing.
"""

from collections.abc import Sequence, Set

import numpy as np
import numpy.typing as npt


def _relevance(ranked: Sequence[str], golden: Set[str], n: int) -> npt.NDArray[np.float64]:
    if n < 1:
        raise ValueError(f"cutoff must be >= 1, got {n}")
    seen: set[str] = set()
    flags: list[float] = []
    for tool_id in ranked[:n]:
        flags.append(1.0 if tool_id in golden and tool_id not in seen else 0.0)
        seen.add(tool_id)
    return np.asarray(flags, dtype=np.float64)


def average_precision(ranked: Sequence[str], golden: Set[str], n: int) -> float:
    """Sum of precision@i at each relevant rank i <= n, over min(|golden|, n)."""
    relevance = _relevance(ranked, golden, n)
    if not golden or not relevance.any():
        return 0.0
    precision_at = np.cumsum(relevance) / np.arange(1, relevance.size + 1)
    return float(np.sum(precision_at * relevance) / min(len(golden), n))


def recall_at(ranked: Sequence[str], golden: Set[str], n: int) -> float:
    relevance = _relevance(ranked, golden, n)
    if not golden:
        return 0.0
    return float(relevance.sum() / len(golden))


def dcg_at(relevance: npt.NDArray[np.float64]) -> float:
    discounts = np.log2(np.arange(2, relevance.size + 2))
    return float(np.sum(relevance / discounts))


def ndcg_at(ranked: Sequence[str], golden: Set[str], n: int) -> float:
    """DCG@n over the ideal DCG of min(|golden|, n) relevant tools at the top."""
    relevance = _relevance(ranked, golden, n)
    if not golden:
        return 0.0
    ideal = dcg_at(np.ones(min(len(golden), n), dtype=np.float64))
    return dcg_at(relevance) / ideal
