"""
Configuration settings for the wfcheck command line.
Environment-based defaults; every value can be overridden with a WFCHECK_
variable or a .env file, and most with a command-line flag.
"""

from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="WFCHECK_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = "wfcheck"
    app_version: str = "1.0.0"
    debug: bool = False
    log_level: str = "WARNING"

    # Analysis
    default_function: Literal["max", "n", "ek"] = "max"
    default_format: Literal["table", "json"] = "table"
    intruder_name: str = "I"
    session_symbol: str = "i"

    # Oracle bounds
    oracle_depth: int = Field(4, ge=0)
    oracle_sessions: int = Field(2, ge=1)
    knowledge_cap: int = Field(20000, ge=1)
    state_cap: int = Field(200000, ge=1)
    candidate_cap: int = Field(6, ge=1)  # inputs tried per receive

    # Output
    color: bool = True


# Global settings instance
settings = Settings()
