"""
Process-level configuration for the finray toolkit.

Study definitions (designs, grids, scenarios) live in the JSON study config;
this module only covers settings that belong to the running process.
"""

import os
from typing import Optional
from pydantic import BaseModel, Field
from dotenv import load_dotenv


class Config(BaseModel):
    """Application configuration."""

    # Logging
    log_level: str = "WARNING"

    # Worker pool size for grid sweeps
    jobs: int = Field(1, ge=1)

    # Default locations
    output_dir: str = "results"
    config_path: Optional[str] = None

    @classmethod
    def from_env(cls) -> "Config":
        """Load configuration from environment variables."""
        load_dotenv()

        return cls(
            log_level=os.getenv("FINRAY_LOG_LEVEL", "WARNING"),
            jobs=int(os.getenv("FINRAY_JOBS", "1")),
            output_dir=os.getenv("FINRAY_OUTPUT_DIR", "results"),
            config_path=os.getenv("FINRAY_CONFIG"),
        )


# Global configuration instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = Config.from_env()
    return _config


def reset_config():
    """Reset the global configuration (useful for testing)."""
    global _config
    _config = None
