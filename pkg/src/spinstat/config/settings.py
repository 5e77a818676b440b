"""Configuration management using dotenv."""

import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv


class Settings:
    """Command-line settings loaded from environment variables."""

    def __init__(self, env_path: Optional[Path] = None):
        """Initialize settings from .env file or environment variables.

        Args:
            env_path: Optional path to .env file. If not provided, searches in
                     current directory and parent directories.
        """
        if env_path:
            load_dotenv(env_path)
        else:
            load_dotenv()

        # Numerics
        self.tolerance: float = self._get_float("SPINSTAT_TOLERANCE", 1e-10)
        self.forbidden_ratio: float = self._get_float("SPINSTAT_FORBIDDEN_RATIO", 1e-6)
        self.grid_refine: int = max(1, self._get_int("SPINSTAT_GRID_REFINE", 1) or 1)

        # Reports
        self.output_format: str = os.getenv("SPINSTAT_OUTPUT_FORMAT", "json").lower()
        if self.output_format not in ("json", "tsv"):
            self.output_format = "json"

        # Logging
        self.log_level: str = os.getenv("SPINSTAT_LOG_LEVEL", "WARNING").upper()
        self.log_file: bool = os.getenv("SPINSTAT_LOG_FILE", "false").lower() == "true"

    def _get_int(self, key: str, default: Optional[int] = None) -> Optional[int]:
        """Get integer from environment variable."""
        value = os.getenv(key)
        if value is None:
            return default
        try:
            return int(value)
        except ValueError:
            return default

    def _get_float(self, key: str, default: float) -> float:
        """Get float from environment variable."""
        value = os.getenv(key)
        if value is None:
            return default
        try:
            return float(value)
        except ValueError:
            return default

    def __repr__(self) -> str:
        return (
            f"Settings(tolerance={self.tolerance!r}, "
            f"output_format={self.output_format!r}, log_level={self.log_level!r})"
        )


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the global settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def init_settings(env_path: Optional[Path] = None) -> Settings:
    """Initialize or reinitialize settings."""
    global _settings
    _settings = Settings(env_path)
    return _settings
