"""
Named retrieval hooks: rerankers and query transforms.

Hook names are what `RetrievalConfig.reranker` and `.query_transform` hold.
"""

from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

from src.core.retrieval_port import RetrievalConfigError

RerankerAlias = Literal["identity", "oracle", "llm"]


@dataclass(frozen=True)
class RerankerSpec:
    alias: RerankerAlias
    description: str
    # Needs the instance's golden tools, so only usable in evaluation runs
    needs_golden: bool = False
    remote: bool = False


@dataclass(frozen=True)
class QueryTransformSpec:
    alias: str
    description: str
    apply: Callable[[str], str]


_RERANKERS: dict[str, RerankerSpec] = {
    spec.alias: spec
    for spec in [
        RerankerSpec(alias="identity", description="Keeps the first-pass order.", needs_golden=False),
        RerankerSpec(
            alias="oracle",
            description="Moves golden tools to the front, otherwise stable. Evaluation only.",
            needs_golden=True,
        ),
        RerankerSpec(
            alias="llm",
            description="Chat-completions reranker at RERANKER_API_URL; falls back to identity on transport failure.",
            needs_golden=False,
            remote=True,
        ),
    ]
}

_QUERY_TRANSFORMS: dict[str, QueryTransformSpec] = {
    "identity": QueryTransformSpec(
        alias="identity",
        description="Passes the query through unchanged.",
        apply=lambda query: query,
    ),
}


def lookup_reranker(alias: str) -> RerankerSpec:
    try:
        return _RERANKERS[alias]
    except KeyError as exc:
        raise RetrievalConfigError(
            f"Unknown reranker: '{alias}'. Known rerankers: {', '.join(sorted(_RERANKERS))}"
        ) from exc


def list_all_rerankers() -> list[RerankerSpec]:
    return sorted(_RERANKERS.values(), key=lambda spec: spec.alias)


def lookup_query_transform(alias: str) -> QueryTransformSpec:
    try:
        return _QUERY_TRANSFORMS[alias]
    except KeyError as exc:
        raise RetrievalConfigError(
            f"Unknown query transform: '{alias}'. Known transforms: {', '.join(sorted(_QUERY_TRANSFORMS))}"
        ) from exc


def list_all_query_transforms() -> list[QueryTransformSpec]:
    return sorted(_QUERY_TRANSFORMS.values(), key=lambda spec: spec.alias)
