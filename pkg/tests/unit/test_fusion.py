import numpy as np
import pytest

from src.core.embedding_port import EmbeddingVector, ToolDocument
from src.core.fusion import RRF_K, hybrid_search, min_max_normalize, reciprocal_rank_fusion
from src.core.lexical_index import LexicalIndex, build_lexical_index, lexical_search
from src.core.vector_index import VectorIndex, build_vector_index, vector_search


def _indexes(docs: dict[str, tuple[str, tuple[float, ...]]]) -> tuple[LexicalIndex, VectorIndex]:
    lex = build_lexical_index(ToolDocument(doc_id, text) for doc_id, (text, _) in docs.items())
    vec = build_vector_index((doc_id, EmbeddingVector.of(values)) for doc_id, (_, values) in docs.items())
    return lex, vec


TWO_SIDED = {
    "a": ("weather report", (1.0, 0.0)),
    "b": ("stock quote", (0.0, 1.0)),
}

FOUR_DOCS = {
    "d1": ("stock price stock", (0.2, 0.9, 0.1)),
    "d2": ("stock weather", (0.7, 0.1, 0.3)),
    "d3": ("weather now", (0.9, 0.2, 0.1)),
    "d4": ("city map", (0.1, 0.1, 0.9)),
}

NEGATIVE_COSINES = {
    "a": ("weather report", (-0.1, 1.0)),
    "b": ("city map", (-0.5, 1.0)),
    "c": ("time zone", (-1.0, 1.0)),
    "d": ("unit convert", (-1.0, 0.5)),
    "e": ("stock quote", (-1.0, 0.1)),
}


class TestMinMaxNormalize:
    def test_should_scale_to_unit_interval(self) -> None:
        assert min_max_normalize({"a": 2.0, "b": 4.0, "c": 3.0}) == {"a": 0.0, "b": 1.0, "c": 0.5}

    def test_should_map_constant_side_to_zero(self) -> None:
        assert min_max_normalize({"a": 0.7}) == {"a": 0.0}
        assert min_max_normalize({"a": 0.3, "b": 0.3}) == {"a": 0.0, "b": 0.0}
        assert min_max_normalize({}) == {}


class TestHybridSearch:
    def test_should_fuse_vector_only_candidate_to_alpha(self) -> None:
        lex, vec = _indexes(TWO_SIDED)

        hits = hybrid_search(lex, vec, "stock", EmbeddingVector.of((1.0, 0.0)), 2, 0.8)

        assert [(hit.tool_id, round(hit.score, 12)) for hit in hits] == [("a", 0.8), ("b", 0.2)]

    def test_alpha_one_should_follow_vector_ranking(self) -> None:
        lex, vec = _indexes(FOUR_DOCS)
        query = EmbeddingVector.of((0.5, 0.5, 0.2))

        fused = hybrid_search(lex, vec, "stock", query, 3, 1.0)

        assert [hit.tool_id for hit in fused] == [hit.tool_id for hit in vector_search(vec, query, 3)]

    @pytest.mark.parametrize("k", [1, 2])
    def test_alpha_one_should_follow_vector_ranking_with_negative_cosines(self, k: int) -> None:
        # Only "e" matches the query term and it has the lowest cosine of all
        lex, vec = _indexes(NEGATIVE_COSINES)
        query = EmbeddingVector.of((1.0, 0.0))

        fused = hybrid_search(lex, vec, "stock", query, k, 1.0)

        assert [hit.tool_id for hit in fused] == [hit.tool_id for hit in vector_search(vec, query, k)]
        assert fused[0].tool_id == "a"

    def test_lexical_only_candidate_should_keep_its_cosine(self) -> None:
        lex, vec = _indexes(NEGATIVE_COSINES)

        hits = hybrid_search(lex, vec, "stock", EmbeddingVector.of((1.0, 0.0)), 1, 0.8)

        # e: vector side normalises to 0, lexical side to 1
        assert [(hit.tool_id, round(hit.score, 12)) for hit in hits] == [("a", 0.8)]

    def test_alpha_zero_should_follow_lexical_ranking(self) -> None:
        lex, vec = _indexes(FOUR_DOCS)

        fused = hybrid_search(lex, vec, "stock", EmbeddingVector.of((0.5, 0.5, 0.2)), 2, 0.0)

        assert [hit.tool_id for hit in fused] == [hit.tool_id for hit in lexical_search(lex, "stock", 2)]
        assert [hit.tool_id for hit in fused] == ["d1", "d2"]

    def test_should_stay_within_unit_interval(self) -> None:
        rng = np.random.default_rng(2)
        words = ["stock", "price", "weather", "city", "map", "time"]
        docs = {
            f"t{i}": (" ".join(rng.choice(words, size=3).tolist()), tuple(rng.uniform(0.01, 1.0, size=4).tolist()))
            for i in range(20)
        }
        lex, vec = _indexes(docs)

        hits = hybrid_search(lex, vec, "stock price", EmbeddingVector.of((0.3, 0.1, 0.5, 0.2)), 5, 0.8)

        assert len(hits) == 5
        assert all(0.0 <= hit.score <= 1.0 for hit in hits)
        assert [hit.score for hit in hits] == sorted((hit.score for hit in hits), reverse=True)

    @pytest.mark.parametrize("alpha", [-0.1, 1.5])
    def test_should_reject_alpha_outside_unit_interval(self, alpha: float) -> None:
        lex, vec = _indexes(TWO_SIDED)

        with pytest.raises(ValueError, match="alpha"):
            hybrid_search(lex, vec, "stock", EmbeddingVector.of((1.0, 0.0)), 2, alpha)


class TestReciprocalRankFusion:
    def test_should_sum_weighted_reciprocal_ranks(self) -> None:
        lex, vec = _indexes(TWO_SIDED)

        hits = reciprocal_rank_fusion(lex, vec, "stock", EmbeddingVector.of((1.0, 0.0)), 2, 0.5)

        scores = {hit.tool_id: hit.score for hit in hits}
        assert scores["a"] == pytest.approx(0.5 / (RRF_K + 1))
        assert scores["b"] == pytest.approx(0.5 / (RRF_K + 2) + 0.5 / (RRF_K + 1))
        assert [hit.tool_id for hit in hits] == ["b", "a"]

    def test_alpha_one_should_follow_vector_ranking(self) -> None:
        lex, vec = _indexes(FOUR_DOCS)
        query = EmbeddingVector.of((0.5, 0.5, 0.2))

        fused = reciprocal_rank_fusion(lex, vec, "stock", query, 4, 1.0)

        assert [hit.tool_id for hit in fused] == [hit.tool_id for hit in vector_search(vec, query, 4)]
