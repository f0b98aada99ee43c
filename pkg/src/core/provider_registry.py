"""
Embedding provider registry.

Maps provider aliases to what each one needs from the environment.
Single source of truth for `EMBEDDING_PROVIDER` values.
"""

from dataclasses import dataclass
from typing import Literal

ProviderAlias = Literal["hash", "cache", "remote"]


@dataclass(frozen=True)
class ProviderSpec:
    alias: ProviderAlias
    description: str
    needs_cache_path: bool = False
    needs_api_url: bool = False


# fmt: off
_REGISTRY: dict[str, ProviderSpec] = {
    spec.alias: spec
    for spec in [
        ProviderSpec(
            alias="hash",
            description="Signed token-hash bag projected to EMBEDDING_DIMENSION and L2-normalised. Offline and deterministic.",
        ),
        ProviderSpec(
            alias="cache",
            description="Read-only lookup in the EMBEDDING_CACHE_PATH record file; a miss is an error, never a network call.",
            needs_cache_path=True,
        ),
        ProviderSpec(
            alias="remote",
            description="Embeddings HTTP API at EMBEDDING_API_URL; writes through to EMBEDDING_CACHE_PATH when set.",
            needs_api_url=True,
        ),
    ]
}
# fmt: on


def lookup_provider(alias: str) -> ProviderSpec:
    try:
        return _REGISTRY[alias]
    except KeyError as exc:
        known = ", ".join(sorted(_REGISTRY))
        raise KeyError(f"Unknown embedding provider: '{alias}'. Known providers: {known}") from exc


def list_all_providers() -> list[ProviderSpec]:
    return sorted(_REGISTRY.values(), key=lambda spec: spec.alias)
