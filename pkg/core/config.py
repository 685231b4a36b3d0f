"""
core/config.py
Environment-based configuration using pydantic-settings.
Loads from .env file automatically; every field has a safe default so the
CLI runs out of the box.
"""

from functools import lru_cache

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Process-level settings loaded from environment variables / .env file."""

    # --- Run ledger (sqlite audit trail of CLI invocations) ---
    LEDGER_DATABASE_URL: str = "sqlite+aiosqlite:///./medial_runs.db"
    LEDGER_ENABLED: bool = True

    # --- Runtime ---
    LOG_LEVEL: str = "INFO"
    DEFAULT_SEED: int = 0
    TORCH_NUM_THREADS: int = 0      # 0 = leave torch's own default alone

    model_config = {
        "env_file": ".env",
        "extra": "ignore",
    }


@lru_cache
def get_settings() -> Settings:
    """Singleton access to process settings."""
    return Settings()
