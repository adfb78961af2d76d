"""
Runtime configuration for bentcodebook

Values come from the environment (optionally a .env file) and can be
overridden per call; library code reads the module-level `settings`.
"""

import logging
import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)

# --- Defaults ---

DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_EXACT_GUARD = 20_000
DEFAULT_FLOAT_GUARD = 20_000
DEFAULT_BUILD_GUARD = 50_000_000
DEFAULT_TOLERANCE = 1e-9
DEFAULT_GRAM_MEMORY_MB = 512


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}")
        return default


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning(f"Ignoring non-numeric {name}={raw!r}")
        return default


class Settings(BaseModel):
    log_level: str = DEFAULT_LOG_LEVEL
    max_threads: Optional[int] = Field(default=None, ge=1)
    exact_guard: int = Field(default=DEFAULT_EXACT_GUARD, ge=2)
    float_guard: int = Field(default=DEFAULT_FLOAT_GUARD, ge=2)
    build_guard: int = Field(default=DEFAULT_BUILD_GUARD, ge=1)
    tolerance: float = Field(default=DEFAULT_TOLERANCE, gt=0)
    gram_memory_mb: int = Field(default=DEFAULT_GRAM_MEMORY_MB, ge=1)

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, value: str) -> str:
        return value.upper()

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            log_level=os.getenv("LOG_LEVEL", DEFAULT_LOG_LEVEL),
            max_threads=_env_int("BENTCODEBOOK_MAX_THREADS", None),
            exact_guard=_env_int("BENTCODEBOOK_EXACT_GUARD", DEFAULT_EXACT_GUARD),
            float_guard=_env_int("BENTCODEBOOK_FLOAT_GUARD", DEFAULT_FLOAT_GUARD),
            build_guard=_env_int("BENTCODEBOOK_BUILD_GUARD", DEFAULT_BUILD_GUARD),
            tolerance=_env_float("BENTCODEBOOK_TOLERANCE", DEFAULT_TOLERANCE),
            gram_memory_mb=_env_int("BENTCODEBOOK_GRAM_MEMORY_MB", DEFAULT_GRAM_MEMORY_MB),
        )

    @property
    def gram_memory_bytes(self) -> int:
        return self.gram_memory_mb * 1024 * 1024

    def thread_count(self, requested: Optional[int] = None) -> int:
        """Threads to use: the request (or all cores), capped by max_threads."""
        count = requested or os.cpu_count() or 1
        if self.max_threads is not None:
            count = min(count, self.max_threads)
        return max(1, count)


# Global settings instance
settings = Settings.from_env()
