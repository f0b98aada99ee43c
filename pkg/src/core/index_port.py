"""Shared result type and errors for the lexical and vector indexes."""

from dataclasses import dataclass


class IndexBuildError(ValueError):
    """Raised when index input is inconsistent; the message names the offending id."""

    def __init__(self, message: str, *, doc_id: str | None = None) -> None:
        super().__init__(message)
        self.doc_id = doc_id


class UnknownDocumentError(KeyError):
    """Raised when scoring a doc id the index does not hold."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown document"


@dataclass(frozen=True)
class ScoredTool:
    tool_id: str
    score: float


def rank_scores(scores: dict[str, float], k: int) -> list[ScoredTool]:
    """Top-k by descending score, ties by ascending id."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return [ScoredTool(tool_id, score) for tool_id, score in ordered[:k]]
