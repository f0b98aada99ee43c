"""HTTP client for an embeddings API (`{input, model}` -> `{vector}`)."""

from __future__ import annotations

import json
import logging
from collections.abc import Mapping, Sequence
from typing import cast

import requests

from src.core.embedding_port import EmbeddingTransportError, EmbeddingVector

logger = logging.getLogger(__name__)

JsonObject = Mapping[str, object]

_HTTP_SUCCESS = range(200, 300)


class RemoteEmbedder:
    """Synchronous embeddings client; callers may parallelise across texts."""

    def __init__(
        self,
        api_url: str,
        *,
        model: str,
        api_key: str = "",
        timeout_seconds: float = 30.0,
        session: requests.Session | None = None,
    ) -> None:
        if not api_url:
            raise ValueError("EMBEDDING_API_URL is not set; the remote provider needs an endpoint")
        self.api_url = api_url
        self.timeout_seconds = timeout_seconds
        self._model = model
        self._api_key = api_key
        self._session = session or requests.Session()

    @property
    def name(self) -> str:
        return "remote"

    @property
    def model(self) -> str:
        return self._model

    def embed(self, text: str) -> EmbeddingVector:
        if not text:
            raise ValueError("cannot embed empty text")
        payload = self._post({"input": text, "model": self._model})
        return _parse_embedding(payload)

    def embed_many(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        """Embed each distinct text once and fan the results back out in input order."""
        unique: dict[str, EmbeddingVector] = {}
        for text in texts:
            if text not in unique:
                unique[text] = self.embed(text)
        if len(unique) < len(texts):
            logger.debug(f"Coalesced {len(texts)} texts into {len(unique)} embedding requests")
        return [unique[text] for text in texts]

    def _post(self, body: dict[str, object]) -> JsonObject:
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        try:
            response = self._session.post(
                self.api_url,
                json=body,
                headers=headers,
                timeout=self.timeout_seconds,
            )
        except requests.Timeout as exc:
            raise EmbeddingTransportError(
                f"embeddings request timed out after {self.timeout_seconds}s"
            ) from exc
        except requests.RequestException as exc:
            raise EmbeddingTransportError(f"embeddings request failed: {exc}") from exc

        if response.status_code not in _HTTP_SUCCESS:
            raise EmbeddingTransportError(
                f"embeddings API returned HTTP {response.status_code}: {response.text[:200]}",
                status=response.status_code,
                retry_after=_retry_after(response),
            )
        try:
            decoded: object = json.loads(response.text)
        except json.JSONDecodeError as exc:
            raise EmbeddingTransportError(
                f"embeddings API returned invalid JSON: {exc.msg}",
                status=response.status_code,
            ) from exc
        if not isinstance(decoded, Mapping):
            raise EmbeddingTransportError(
                "embeddings API response is not an object", status=response.status_code
            )
        return cast(JsonObject, decoded)


def _retry_after(response: requests.Response) -> float | None:
    value = response.headers.get("Retry-After")
    if value is None:
        return None
    try:
        return float(value)
    except ValueError:
        # HTTP-date form is not interpreted
        return None


def _parse_embedding(payload: JsonObject) -> EmbeddingVector:
    vector = payload.get("vector")
    if vector is None:
        data = payload.get("data")
        if isinstance(data, list) and data and isinstance(data[0], Mapping):
            vector = data[0].get("embedding")
    if not isinstance(vector, list) or not all(isinstance(v, int | float) for v in vector):
        raise EmbeddingTransportError("embeddings API response has no numeric 'vector' field")
    return EmbeddingVector.of(cast(list[float], vector))
