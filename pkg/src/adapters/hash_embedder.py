"""Deterministic token-hash embedder for offline runs and tests."""

from __future__ import annotations

import hashlib

import numpy as np

from src.adapters.text import tokenize
from src.core.embedding_port import EmbeddingVector


class HashEmbedder:
    """
    Signed feature hashing of the token bag, L2-normalised.

    Each token maps to one bucket and a +/-1 sign, so unrelated texts have an
    expected cosine similarity of 0.
    """

    def __init__(self, dimension: int = 256, model: str = "token-hash-v1") -> None:
        if dimension <= 0:
            raise ValueError(f"dimension must be > 0, got {dimension}")
        self._dimension = dimension
        self._model = model

    @property
    def name(self) -> str:
        return "hash"

    @property
    def model(self) -> str:
        return self._model

    @property
    def dimension(self) -> int:
        return self._dimension

    def embed(self, text: str) -> EmbeddingVector:
        if not text:
            raise ValueError("cannot embed empty text")
        # Punctuation-only text still gets a stable, non-zero vector
        tokens = tokenize(text) or [text]
        values = np.zeros(self._dimension, dtype=np.float64)
        for token in tokens:
            bucket, sign = self._hash(token)
            values[bucket] += sign
        norm = float(np.linalg.norm(values))
        if norm == 0.0:
            # Opposite signs cancelled out; fall back to hashing the whole text
            bucket, sign = self._hash(text)
            values[bucket] = sign
            norm = 1.0
        return EmbeddingVector.of((values / norm).tolist())

    def _hash(self, token: str) -> tuple[int, float]:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=16).digest()
        bucket = int.from_bytes(digest[:8], "little") % self._dimension
        sign = 1.0 if digest[8] & 1 else -1.0
        return bucket, sign
