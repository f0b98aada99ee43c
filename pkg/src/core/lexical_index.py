"""
Okapi BM25 over tool documents.

IDF uses the +1-smoothed form ln(1 + (N - df + 0.5) / (df + 0.5)), so scores
are never negative. Defaults k1=1.2, b=0.75.
"""

from __future__ import annotations

import json
import logging
import math
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType

from src.adapters.text import tokenize
from src.core.embedding_port import ToolDocument
from src.core.index_port import IndexBuildError, ScoredTool, UnknownDocumentError, rank_scores

logger = logging.getLogger(__name__)

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75

Posting = tuple[str, int]

# Snapshot record kind -> field count after the kind
_RECORD_WIDTHS = {"params": 2, "doc": 2, "term": 3}


@dataclass(frozen=True)
class LexicalIndex:
    postings: Mapping[str, tuple[Posting, ...]]
    doc_lengths: Mapping[str, int]
    avg_doc_length: float
    doc_count: int
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B
    # doc id -> term -> tf, derived from postings
    term_frequencies: Mapping[str, Mapping[str, int]] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        term_frequencies: dict[str, dict[str, int]] = {doc_id: {} for doc_id in self.doc_lengths}
        for term, postings in self.postings.items():
            for doc_id, tf in postings:
                if doc_id not in term_frequencies:
                    raise IndexBuildError(f"posting for '{term}' names unknown doc {doc_id}", doc_id=doc_id)
                term_frequencies[doc_id][term] = tf
        object.__setattr__(self, "postings", MappingProxyType(dict(self.postings)))
        object.__setattr__(self, "doc_lengths", MappingProxyType(dict(self.doc_lengths)))
        object.__setattr__(self, "term_frequencies", MappingProxyType(term_frequencies))

    def document_frequency(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def idf(self, term: str) -> float:
        df = self.document_frequency(term)
        return math.log(1.0 + (self.doc_count - df + 0.5) / (df + 0.5))

    def term_frequency(self, term: str, doc_id: str) -> int:
        if doc_id not in self.term_frequencies:
            raise UnknownDocumentError(f"unknown document {doc_id}")
        return self.term_frequencies[doc_id].get(term, 0)


def build_lexical_index(
    docs: Iterable[ToolDocument],
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> LexicalIndex:
    doc_lengths: dict[str, int] = {}
    postings: dict[str, list[Posting]] = {}
    for doc in docs:
        if doc.tool_id in doc_lengths:
            raise IndexBuildError(f"duplicate document id {doc.tool_id}", doc_id=doc.tool_id)
        tokens = tokenize(doc.text)
        doc_lengths[doc.tool_id] = len(tokens)
        for term, tf in Counter(tokens).items():
            postings.setdefault(term, []).append((doc.tool_id, tf))

    doc_count = len(doc_lengths)
    avg_doc_length = sum(doc_lengths.values()) / doc_count if doc_count else 0.0
    return LexicalIndex(
        postings={term: tuple(entries) for term, entries in postings.items()},
        doc_lengths=doc_lengths,
        avg_doc_length=avg_doc_length,
        doc_count=doc_count,
        k1=k1,
        b=b,
    )


def bm25_score(idx: LexicalIndex, query: str, doc_id: str) -> float:
    if doc_id not in idx.doc_lengths:
        raise UnknownDocumentError(f"unknown document {doc_id}")
    score = 0.0
    for term in tokenize(query):
        tf = idx.term_frequency(term, doc_id)
        if tf:
            score += _term_weight(idx, term, tf, idx.doc_lengths[doc_id])
    return score


def lexical_search(idx: LexicalIndex, query: str, k: int) -> list[ScoredTool]:
    """Top-k docs by BM25; zero-score docs never appear."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    scores: dict[str, float] = {}
    # Accumulates in query-term order, the same order bm25_score sums in
    for term in tokenize(query):
        for doc_id, tf in idx.postings.get(term, ()):
            scores[doc_id] = scores.get(doc_id, 0.0) + _term_weight(idx, term, tf, idx.doc_lengths[doc_id])
    return rank_scores({doc_id: s for doc_id, s in scores.items() if s > 0.0}, k)


def _term_weight(idx: LexicalIndex, term: str, tf: int, doc_length: int) -> float:
    length_ratio = doc_length / idx.avg_doc_length if idx.avg_doc_length else 0.0
    denominator = tf + idx.k1 * (1.0 - idx.b + idx.b * length_ratio)
    return idx.idf(term) * tf * (idx.k1 + 1.0) / denominator


def save_lexical_index(idx: LexicalIndex, path: Path) -> None:
    """
    Snapshot as tab-separated records, one per line:

        params  <k1>  <b>
        doc     <json id>  <length>
        term    <json term>  <json doc id>  <tf>
    """
    lines = [f"params\t{idx.k1!r}\t{idx.b!r}\n"]
    lines.extend(f"doc\t{json.dumps(doc_id)}\t{length}\n" for doc_id, length in idx.doc_lengths.items())
    for term, postings in idx.postings.items():
        lines.extend(f"term\t{json.dumps(term)}\t{json.dumps(doc_id)}\t{tf}\n" for doc_id, tf in postings)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(lines), encoding="utf-8")
    logger.info(f"💾 Saved lexical index ({idx.doc_count} docs, {len(idx.postings)} terms) to {path}")


def load_lexical_index(path: Path) -> LexicalIndex:
    k1, b = DEFAULT_K1, DEFAULT_B
    doc_lengths: dict[str, int] = {}
    postings: dict[str, list[Posting]] = {}
    for line_number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line:
            continue
        kind, *fields = line.split("\t")
        try:
            if _RECORD_WIDTHS.get(kind) != len(fields):
                raise ValueError(f"unrecognised record '{kind}' with {len(fields)} fields")
            if kind == "params":
                k1, b = float(fields[0]), float(fields[1])
            elif kind == "doc":
                doc_lengths[json.loads(fields[0])] = int(fields[1])
            else:
                postings.setdefault(json.loads(fields[0]), []).append((json.loads(fields[1]), int(fields[2])))
        except ValueError as exc:
            raise IndexBuildError(f"{path}:{line_number}: {exc}") from exc

    doc_count = len(doc_lengths)
    return LexicalIndex(
        postings={term: tuple(entries) for term, entries in postings.items()},
        doc_lengths=doc_lengths,
        avg_doc_length=sum(doc_lengths.values()) / doc_count if doc_count else 0.0,
        doc_count=doc_count,
        k1=k1,
        b=b,
    )
