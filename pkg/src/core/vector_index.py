"""Exact cosine-similarity search over tool embeddings."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from src.core.embedding_port import EmbeddingDimensionError, EmbeddingVector
from src.core.index_port import IndexBuildError, ScoredTool, rank_scores

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class VectorIndex:
    """
    Dense matrix of stored vectors with their L2 norms.

    Rows follow `ids`; every norm is > 0.
    """

    ids: tuple[str, ...]
    dimension: int
    matrix: FloatArray = field(repr=False, compare=False)
    norms: FloatArray = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.ids)


def build_vector_index(vectors: Iterable[tuple[str, EmbeddingVector]], dimension: int | None = None) -> VectorIndex:
    """
    Raises:
        IndexBuildError: duplicate id, dimension mismatch or zero vector, naming the id.
    """
    ids: list[str] = []
    rows: list[tuple[float, ...]] = []
    seen: set[str] = set()
    for tool_id, vector in vectors:
        if tool_id in seen:
            raise IndexBuildError(f"duplicate vector id {tool_id}", doc_id=tool_id)
        if dimension is None:
            dimension = vector.dimension
        elif vector.dimension != dimension:
            raise IndexBuildError(
                f"vector {tool_id} has dimension {vector.dimension}, index has {dimension}",
                doc_id=tool_id,
            )
        if not any(vector.values):
            raise IndexBuildError(f"vector {tool_id} is all zeros; cosine is undefined", doc_id=tool_id)
        seen.add(tool_id)
        ids.append(tool_id)
        rows.append(vector.values)

    resolved_dimension = dimension or 0
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), resolved_dimension)
    norms = np.linalg.norm(matrix, axis=1)
    matrix.setflags(write=False)
    norms.setflags(write=False)
    return VectorIndex(ids=tuple(ids), dimension=resolved_dimension, matrix=matrix, norms=norms)


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.dimension != b.dimension:
        raise EmbeddingDimensionError(f"cannot compare dimension {a.dimension} with {b.dimension}")
    left = np.asarray(a.values, dtype=np.float64)
    right = np.asarray(b.values, dtype=np.float64)
    denominator = float(np.linalg.norm(left) * np.linalg.norm(right))
    if denominator == 0.0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    return float(np.dot(left, right) / denominator)


def cosine_scores(idx: VectorIndex, q: EmbeddingVector) -> dict[str, float]:
    """Cosine of `q` against every stored vector, keyed by id."""
    if not idx.ids:
        return {}
    if q.dimension != idx.dimension:
        raise EmbeddingDimensionError(f"query has dimension {q.dimension}, index has {idx.dimension}")
    query = np.asarray(q.values, dtype=np.float64)
    query_norm = float(np.linalg.norm(query))
    if query_norm == 0.0:
        raise ValueError("cosine similarity is undefined for a zero query vector")
    similarities = np.clip((idx.matrix @ query) / (idx.norms * query_norm), -1.0, 1.0)
    return dict(zip(idx.ids, similarities.tolist(), strict=True))


def vector_search(idx: VectorIndex, q: EmbeddingVector, k: int) -> list[ScoredTool]:
    """Exhaustive scan; top-k by cosine descending, ties by ascending id."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return rank_scores(cosine_scores(idx, q), k)
