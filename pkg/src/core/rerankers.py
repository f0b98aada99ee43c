"""In-process rerank hooks."""

from collections.abc import Sequence

from src.core.retrieval_port import RetrievalConfigError
from src.core.tool_graph import ToolNode


class IdentityReranker:
    def reorder(
        self,
        query: str,
        candidates: Sequence[ToolNode],
        golden: frozenset[str] | None = None,
    ) -> list[str]:
        return [candidate.id for candidate in candidates]


class OracleReranker:
    """Golden tools first, each group keeping its first-pass order."""

    def reorder(
        self,
        query: str,
        candidates: Sequence[ToolNode],
        golden: frozenset[str] | None = None,
    ) -> list[str]:
        if golden is None:
            raise RetrievalConfigError("the oracle reranker needs golden tools; use it only in evaluation runs")
        ids = [candidate.id for candidate in candidates]
        return [tool_id for tool_id in ids if tool_id in golden] + [
            tool_id for tool_id in ids if tool_id not in golden
        ]


def repair_order(head: Sequence[str], proposed: Sequence[str]) -> list[str]:
    """
    Make `proposed` a permutation of `head`.

    Unknown and repeated ids are dropped; ids the hook left out are appended
    in their original order.
    """
    allowed = set(head)
    order: list[str] = []
    for tool_id in proposed:
        if tool_id in allowed and tool_id not in order:
            order.append(tool_id)
    order.extend(tool_id for tool_id in head if tool_id not in order)
    return order
