"""Configuration management using pydantic-settings."""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from environment variables and .env."""

    log_level: str = Field(default="warning", description="Logging level")

    # Hunt defaults, overridden by command-line flags
    hunt_seed: int = Field(default=42, description="Master seed")
    hunt_trials: int = Field(default=1000, description="Number of trials")
    hunt_max_dim: int = Field(default=3, description="Largest of m, n, l")
    hunt_entry_bound: int = Field(default=2, description="Bound on entry real and imaginary parts")
    hunt_weight_kind: str = Field(default="signature", description="signature/random_hermitian/identity")
    hunt_mode: str = Field(default="random", description="random/exhaustive")
    hunt_workers: int = Field(default=1, description="Process pool size")
    hunt_real_entries: bool = Field(default=False, description="Restrict entries to real integers")

    weight_entry_bound: int = Field(default=2, description="Bound on G for random Hermitian weights")

    # Output
    json_indent: Optional[int] = Field(default=None, description="Indent for JSON output (empty = compact)")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )


# Global settings instance
settings = Settings()
