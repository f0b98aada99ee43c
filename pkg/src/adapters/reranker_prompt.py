"""Prompt codec for the LLM reranker: build the instruction, parse the ranked names back."""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from typing import cast

from src.core.retrieval_port import RerankerResponseError
from src.core.tool_graph import ToolNode

_INSTRUCTIONS = """\
You are a reranker for tool retrieval. Rank the candidate tools below by how
relevant each one is to the user query, most relevant first.

Return only a JSON object of the form {"tools": ["<name>", ...]} listing every
candidate name exactly once, copied verbatim from the candidate list. Do not
invent tool names."""


def build_reranker_prompt(query: str, candidates: Sequence[ToolNode]) -> str:
    """
    Deterministic prompt: the query, then one JSON line per candidate.

    Names and descriptions are JSON-encoded so braces and quotes survive
    the round trip through the model's reply.
    """
    if not candidates:
        raise ValueError("reranker prompt needs at least one candidate")
    lines = [
        _INSTRUCTIONS,
        "",
        f"User query: {json.dumps(query, ensure_ascii=False)}",
        "",
        f"Candidate tools ({len(candidates)}):",
    ]
    for candidate in candidates:
        entry = {"name": candidate.name, "description": candidate.description}
        lines.append(json.dumps(entry, ensure_ascii=False, sort_keys=True))
    return "\n".join(lines) + "\n"


def parse_reranker_response(text: str, candidates: Sequence[ToolNode]) -> list[str]:
    """
    Map the reply's tool names back to candidate ids, in reply order.

    Unknown and repeated names are dropped; omitted candidates are left for the
    caller to append.
    """
    payload = _decode_object(text)
    names = payload.get("tools")
    if not isinstance(names, list):
        raise RerankerResponseError("reranker reply has no 'tools' list")

    by_name: dict[str, str] = {}
    for candidate in candidates:
        by_name.setdefault(candidate.name, candidate.id)
    ordered: list[str] = []
    for name in names:
        tool_id = by_name.get(name) if isinstance(name, str) else None
        if tool_id is not None and tool_id not in ordered:
            ordered.append(tool_id)
    return ordered


def _decode_object(text: str) -> Mapping[str, object]:
    # Models sometimes wrap the object in prose or a code fence
    start = text.find("{")
    end = text.rfind("}")
    if start == -1 or end < start:
        raise RerankerResponseError("reranker reply contains no JSON object")
    try:
        decoded: object = json.loads(text[start : end + 1])
    except json.JSONDecodeError as exc:
        raise RerankerResponseError(f"reranker reply is not valid JSON: {exc.msg}") from exc
    if not isinstance(decoded, Mapping):
        raise RerankerResponseError("reranker reply is not a JSON object")
    return cast(Mapping[str, object], decoded)
