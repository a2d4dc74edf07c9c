"""
Core Module - Ядро приложения
=============================

Компоненты:
- config: Настройки процесса (Pydantic Settings)
- constants: Численные пороги и параметры сценариев
- errors: Иерархия исключений
- logger: Настройка логирования (loguru)
"""

from app.core.config import settings
from app.core.errors import SimulationError
from app.core.logger import logger

__all__ = ["settings", "logger", "SimulationError"]
