"""Application configuration."""

from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="MQC_",
        case_sensitive=False,
    )

    # Application
    app_env: str = "development"
    app_version: str = "0.1.0"
    debug: bool = False
    log_level: str = "INFO"

    # CORS
    cors_origins: str = "http://localhost:3000"

    # Devices and records
    devices_dir: Path | None = None
    default_device: str = "ibmq_system_one"
    output_dir: Path = Path("runs")

    # Experiment defaults
    default_shots: int = 16384
    default_repetitions: int = 8
    calibration_shots: int = 4096
    truncation_k: int = 256

    # Simulation
    trajectory_batch_size: int = 256
    max_state_memory_mb: int = 256

    @property
    def cors_origins_list(self) -> list[str]:
        """Parse CORS origins into list."""
        return [origin.strip() for origin in self.cors_origins.split(",")]


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
