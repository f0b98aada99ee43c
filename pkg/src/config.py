"""
Unified configuration module.
Service behaviour is controlled through environment variables,
optionally loaded from a .env file.
"""

import os
from pathlib import Path
from typing import Literal

from dotenv import load_dotenv

from src.core.embedding_port import ProviderConfig

# Prefer the project-root .env; fall back to the current working directory
env_path = Path(__file__).parent.parent / ".env"
if env_path.exists():
    load_dotenv(dotenv_path=env_path)
else:
    load_dotenv()

ProviderType = Literal["hash", "cache", "remote"]

# === Logging ===
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# === Retrieval defaults ===
# top-k=3 seeds, alpha=0.8 toward vector search, final top-K=30, 10 dependencies per seed
DEFAULT_TOP_K = int(os.getenv("DEFAULT_TOP_K", "3"))
DEFAULT_ALPHA = float(os.getenv("DEFAULT_ALPHA", "0.8"))
DEFAULT_FINAL_TOP_K = int(os.getenv("DEFAULT_FINAL_TOP_K", "30"))
DEFAULT_D_LIMIT = int(os.getenv("DEFAULT_D_LIMIT", "10"))

# === Embedding provider ===
EMBEDDING_PROVIDER: ProviderType = os.getenv("EMBEDDING_PROVIDER", "hash")  # type: ignore
EMBEDDING_MODEL = os.getenv("EMBEDDING_MODEL", "token-hash-v1")
EMBEDDING_DIMENSION = int(os.getenv("EMBEDDING_DIMENSION", "256"))
EMBEDDING_CACHE_PATH = os.getenv("EMBEDDING_CACHE_PATH", "")
# Provider that originally produced cached vectors (namespace of the cache key)
EMBEDDING_CACHE_SOURCE = os.getenv("EMBEDDING_CACHE_SOURCE", "remote")

# Remote embeddings API; never accepted as CLI flags
EMBEDDING_API_URL = os.getenv("EMBEDDING_API_URL", "")
EMBEDDING_API_KEY = os.getenv("EMBEDDING_API_KEY", "")
EMBEDDING_TIMEOUT_SEC = float(os.getenv("EMBEDDING_TIMEOUT_SEC", "30"))

# === Remote LLM reranker ===
RERANKER_API_URL = os.getenv("RERANKER_API_URL", "")
RERANKER_API_KEY = os.getenv("RERANKER_API_KEY", "")
RERANKER_MODEL = os.getenv("RERANKER_MODEL", "gpt-4o-2024-08-06")
RERANKER_TIMEOUT_SEC = float(os.getenv("RERANKER_TIMEOUT_SEC", "60"))
RERANKER_MAX_CONCURRENCY = max(1, int(os.getenv("RERANKER_MAX_CONCURRENCY", "4")))

# === Evaluation ===
EVAL_JOBS = max(1, int(os.getenv("EVAL_JOBS", "1")))


def get_provider_config(
    provider: str | None = None,
    cache_path: str | None = None,
    cache_source: str | None = None,
) -> ProviderConfig:
    """Build the embedding provider config from the environment, with CLI overrides."""
    resolved_cache = cache_path if cache_path is not None else EMBEDDING_CACHE_PATH
    return ProviderConfig(
        provider=provider or EMBEDDING_PROVIDER,
        model=EMBEDDING_MODEL,
        dimension=EMBEDDING_DIMENSION,
        cache_path=Path(resolved_cache) if resolved_cache else None,
        cache_source=cache_source or EMBEDDING_CACHE_SOURCE,
        api_url=EMBEDDING_API_URL,
        api_key=EMBEDDING_API_KEY,
        timeout_seconds=EMBEDDING_TIMEOUT_SEC,
    )
