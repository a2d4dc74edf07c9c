"""
Configuration - Настройки приложения
====================================

Использует Pydantic Settings для загрузки из .env и окружения.
Параметры отдельного запуска (RunConfig) живут в app/simulation/run_config.py.
"""

import os
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Настройки процесса"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        populate_by_name=True,
    )

    # === Output ===
    output_dir: Path = Field(default=Path("reports"), alias="DRO_OUTPUT_DIR")

    # === Logging ===
    log_level: str = Field(default="INFO", alias="DRO_LOG_LEVEL")
    log_file: Optional[Path] = Field(default=None, alias="DRO_LOG_FILE")

    # === Replications ===
    workers: int = Field(default=max(1, (os.cpu_count() or 1)), alias="DRO_WORKERS", ge=1)


# Глобальный экземпляр
settings = Settings()
