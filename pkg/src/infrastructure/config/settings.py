from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=False,
        extra="ignore"  # Ignore extra fields from .env
    )

    app_name: str = Field(default="nolo", alias="APP_NAME")
    log_level: str = Field(default="INFO", alias="LOG_LEVEL")

    # Worker cap for collection, labeling and evaluation
    threads: int = Field(default=1, ge=1, alias="NOLO_THREADS")
    dataset_root: str = Field(default="./data", alias="NOLO_DATASET_ROOT")


settings = Settings()
