"""
Embedding provider factory.
Builds the provider named by a ProviderConfig.
"""

import logging

from src.core.embedding_port import EmbeddingProvider, ProviderConfig
from src.core.provider_registry import lookup_provider

logger = logging.getLogger(__name__)


def create_provider(config: ProviderConfig) -> EmbeddingProvider:
    """
    Create the embedding provider for `config`.

    Raises:
        KeyError: unknown provider alias.
        ValueError: a required path or endpoint is missing.
    """
    spec = lookup_provider(config.provider)
    if spec.needs_cache_path and config.cache_path is None:
        raise ValueError(f"Embedding provider '{spec.alias}' needs EMBEDDING_CACHE_PATH")
    if spec.needs_api_url and not config.api_url:
        raise ValueError(f"Embedding provider '{spec.alias}' needs EMBEDDING_API_URL")

    if spec.alias == "hash":
        from src.adapters.hash_embedder import HashEmbedder

        logger.info(f"🏭 Creating hash embedder (dimension {config.dimension})")
        return HashEmbedder(dimension=config.dimension, model=config.model)

    elif spec.alias == "cache":
        from src.adapters.embedding_cache import EmbeddingCache

        assert config.cache_path is not None
        logger.info(f"🏭 Creating offline embedding cache: {config.cache_path}")
        return EmbeddingCache(
            config.cache_path,
            source=config.cache_source,
            model=config.model,
            offline=True,
        )

    else:
        from src.adapters.embedding_cache import EmbeddingCache
        from src.adapters.remote_embedder import RemoteEmbedder

        remote = RemoteEmbedder(
            config.api_url,
            model=config.model,
            api_key=config.api_key,
            timeout_seconds=config.timeout_seconds,
        )
        if config.cache_path is None:
            logger.info(f"🏭 Creating remote embedder for model: {config.model}")
            return remote
        logger.info(f"🏭 Creating remote embedder for model {config.model} with cache {config.cache_path}")
        return EmbeddingCache(
            config.cache_path,
            source=remote.name,
            model=config.model,
            inner=remote,
            offline=config.offline,
        )
