"""Chat-completions client used by the `llm` reranker hook."""

from __future__ import annotations

import json
import logging
import threading
from collections.abc import Mapping, Sequence
from typing import cast

import requests

from src.adapters.reranker_prompt import build_reranker_prompt, parse_reranker_response
from src.core.retrieval_port import RerankerResponseError, RerankerTransportError
from src.core.tool_graph import ToolNode

logger = logging.getLogger(__name__)

JsonObject = Mapping[str, object]

_HTTP_SUCCESS = range(200, 300)


class LLMRerankerClient:
    """
    Sends the reranker prompt to a chat-completions endpoint.

    At most `max_concurrency` requests are in flight per client.
    """

    def __init__(
        self,
        api_url: str,
        *,
        model: str,
        api_key: str = "",
        timeout_seconds: float = 60.0,
        max_concurrency: int = 4,
        session: requests.Session | None = None,
    ) -> None:
        if max_concurrency < 1:
            raise ValueError(f"max_concurrency must be >= 1, got {max_concurrency}")
        self.api_url = api_url
        self.model = model
        self.timeout_seconds = timeout_seconds
        self._api_key = api_key
        self._session = session or requests.Session()
        self._slots = threading.BoundedSemaphore(max_concurrency)

    def reorder(
        self,
        query: str,
        candidates: Sequence[ToolNode],
        golden: frozenset[str] | None = None,
    ) -> list[str]:
        if not self.api_url:
            raise RerankerTransportError("RERANKER_API_URL is not set")
        prompt = build_reranker_prompt(query, candidates)
        body: dict[str, object] = {
            "model": self.model,
            "temperature": 0,
            "response_format": {"type": "json_object"},
            "messages": [{"role": "user", "content": prompt}],
        }
        with self._slots:
            payload = self._post(body)
        return parse_reranker_response(_message_content(payload), candidates)

    def _post(self, body: dict[str, object]) -> JsonObject:
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        try:
            response = self._session.post(self.api_url, json=body, headers=headers, timeout=self.timeout_seconds)
        except requests.Timeout as exc:
            raise RerankerTransportError(f"reranker request timed out after {self.timeout_seconds}s") from exc
        except requests.RequestException as exc:
            raise RerankerTransportError(f"reranker request failed: {exc}") from exc

        if response.status_code not in _HTTP_SUCCESS:
            raise RerankerTransportError(
                f"reranker API returned HTTP {response.status_code}: {response.text[:200]}",
                status=response.status_code,
            )
        try:
            decoded: object = json.loads(response.text)
        except json.JSONDecodeError as exc:
            raise RerankerResponseError(f"reranker API returned invalid JSON: {exc.msg}") from exc
        if not isinstance(decoded, Mapping):
            raise RerankerResponseError("reranker API response is not an object")
        return cast(JsonObject, decoded)


def _message_content(payload: JsonObject) -> str:
    choices = payload.get("choices")
    if not isinstance(choices, list) or not choices or not isinstance(choices[0], Mapping):
        raise RerankerResponseError("reranker API response has no choices")
    message = choices[0].get("message")
    if not isinstance(message, Mapping) or not isinstance(message.get("content"), str):
        raise RerankerResponseError("reranker API response has no message content")
    return cast(str, message["content"])
