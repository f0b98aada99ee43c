import numpy as np
import pytest

from src.core.embedding_port import EmbeddingDimensionError, EmbeddingVector
from src.core.index_port import IndexBuildError
from src.core.vector_index import build_vector_index, cosine_scores, cosine_similarity, vector_search


def _v(*values: float) -> EmbeddingVector:
    return EmbeddingVector.of(values)


class TestBuildVectorIndex:
    def test_should_record_dimension(self) -> None:
        idx = build_vector_index([("a", _v(1, 0, 0, 0)), ("b", _v(0, 1, 0, 0)), ("c", _v(0, 0, 1, 1))])

        assert idx.dimension == 4
        assert len(idx) == 3
        assert idx.ids == ("a", "b", "c")

    def test_should_reject_duplicate_id(self) -> None:
        with pytest.raises(IndexBuildError, match="duplicate vector id a"):
            build_vector_index([("a", _v(1, 0)), ("a", _v(0, 1))])

    def test_should_reject_dimension_mismatch_naming_id(self) -> None:
        with pytest.raises(IndexBuildError) as exc_info:
            build_vector_index([("a", _v(1, 0)), ("b", _v(1, 0, 0))])

        assert exc_info.value.doc_id == "b"

    def test_should_reject_zero_vector(self) -> None:
        with pytest.raises(IndexBuildError, match="all zeros"):
            build_vector_index([("z", _v(0, 0))])

    def test_should_build_empty_index(self) -> None:
        idx = build_vector_index([])

        assert len(idx) == 0
        assert vector_search(idx, _v(1, 0), 3) == []


class TestCosineSimilarity:
    def test_should_be_one_for_identical_vectors(self) -> None:
        assert cosine_similarity(_v(3, 4), _v(3, 4)) == pytest.approx(1.0, abs=1e-12)

    def test_should_be_zero_for_orthogonal_vectors(self) -> None:
        assert cosine_similarity(_v(1, 0), _v(0, 1)) == 0.0

    def test_should_match_hand_computed_angle(self) -> None:
        assert cosine_similarity(_v(1, 0), _v(1, 1)) == pytest.approx(0.70710678, abs=1e-8)

    def test_should_reject_dimension_mismatch(self) -> None:
        with pytest.raises(EmbeddingDimensionError):
            cosine_similarity(_v(1, 0), _v(1, 0, 0))

    def test_should_be_symmetric_and_scale_invariant(self) -> None:
        rng = np.random.default_rng(5)
        for _ in range(200):
            a = _v(*rng.normal(size=16).tolist())
            b = _v(*rng.normal(size=16).tolist())
            scale = float(rng.uniform(0.1, 10.0))
            scaled = _v(*(x * scale for x in b.values))

            assert cosine_similarity(a, b) == pytest.approx(cosine_similarity(b, a), abs=1e-12)
            assert cosine_similarity(a, scaled) == pytest.approx(cosine_similarity(a, b), abs=1e-9)


class TestVectorSearch:
    def test_should_rank_exact_match_first(self) -> None:
        idx = build_vector_index([("a", _v(1, 0)), ("b", _v(0, 1)), ("c", _v(1, 1))])

        hits = vector_search(idx, _v(0, 1), 3)

        assert hits[0].tool_id == "b"
        assert hits[0].score == pytest.approx(1.0)
        assert [hit.tool_id for hit in hits] == ["b", "c", "a"]

    def test_should_return_full_corpus_when_k_exceeds_size(self) -> None:
        idx = build_vector_index([("a", _v(1, 0)), ("b", _v(0, 1))])

        assert len(vector_search(idx, _v(1, 1), 10)) == 2

    def test_should_break_ties_by_ascending_id(self) -> None:
        idx = build_vector_index([("b", _v(1, 0)), ("a", _v(2, 0))])

        assert [hit.tool_id for hit in vector_search(idx, _v(1, 0), 2)] == ["a", "b"]

    def test_should_reject_query_of_wrong_dimension(self) -> None:
        idx = build_vector_index([("a", _v(1, 0))])

        with pytest.raises(EmbeddingDimensionError):
            vector_search(idx, _v(1, 0, 0), 1)

    def test_should_reject_zero_query(self) -> None:
        idx = build_vector_index([("a", _v(1, 0))])

        with pytest.raises(ValueError):
            vector_search(idx, _v(0, 0), 1)

    def test_should_agree_with_brute_force_on_random_corpora(self) -> None:
        rng = np.random.default_rng(9)
        for _ in range(100):
            size = int(rng.integers(1, 101))
            dimension = int(rng.integers(2, 65))
            vectors = [(f"id{i:03d}", _v(*rng.normal(size=dimension).tolist())) for i in range(size)]
            idx = build_vector_index(vectors)
            query = _v(*rng.normal(size=dimension).tolist())

            expected = sorted(
                ((tool_id, cosine_similarity(query, vector)) for tool_id, vector in vectors),
                key=lambda pair: (-pair[1], pair[0]),
            )
            hits = vector_search(idx, query, size)

            assert [hit.tool_id for hit in hits] == [tool_id for tool_id, _ in expected]
            for hit, (_, score) in zip(hits, expected, strict=True):
                assert hit.score == pytest.approx(score, abs=1e-9)


class TestCosineScores:
    def test_should_score_every_stored_vector(self) -> None:
        idx = build_vector_index([("a", _v(1, 0)), ("b", _v(-1, 0)), ("c", _v(0, 2))])

        scores = cosine_scores(idx, _v(2, 0))

        assert scores == pytest.approx({"a": 1.0, "b": -1.0, "c": 0.0})

    def test_should_be_empty_for_empty_index(self) -> None:
        assert cosine_scores(build_vector_index([]), _v(1, 0)) == {}
