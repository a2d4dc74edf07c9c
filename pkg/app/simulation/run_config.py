"""
Run Config - Параметры одного прогона
=====================================

Плоский файл key=value (python-dotenv), ключи совпадают с полями RunConfig.
Приоритет: флаги CLI > файл > значения по умолчанию.
"""

from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.core.constants import (
    ALLOC_SWITCH_INTERVAL,
    DEFAULT_A0_CONST,
    DEFAULT_BETA,
    DEFAULT_D,
    DEFAULT_MC_SAMPLES,
    DEFAULT_T0,
    DEFAULT_THETA,
    MIN_MC_SAMPLES,
)
from app.core.errors import ConfigError
from app.learning.window import LearningConfig


class RunConfig(BaseModel):
    """Конфигурация прогона (все поля видимы из CLI)"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    scenario: Literal["oscillator", "allocation"] = "oscillator"
    horizon: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)

    # обучение
    beta: float = Field(default=DEFAULT_BETA, gt=0.0, lt=1.0)
    theta: float = Field(default=DEFAULT_THETA, ge=0.0)
    d: float = Field(default=DEFAULT_D, gt=0.0)
    a0_const: float = Field(default=DEFAULT_A0_CONST, gt=0.0)
    t0: int = Field(default=DEFAULT_T0, ge=1)
    c_fallback: Optional[float] = Field(default=None, gt=0.0)
    learning_bound: Literal["certified", "calibrated"] = "calibrated"
    sigma: Optional[float] = Field(default=None, ge=0.0)

    # решатель
    mu: Optional[float] = Field(default=None, gt=0.0)
    step_rule: Literal["inverse-lipschitz", "monotone"] = "inverse-lipschitz"
    inner_steps: int = Field(default=1, ge=1)
    lipschitz: Literal["certified", "nominal"] = "certified"
    control_weight: Optional[float] = Field(default=None, gt=0.0)
    switch_interval: int = Field(default=ALLOC_SWITCH_INTERVAL, ge=1)

    # вывод
    out: Optional[Path] = None
    format: Literal["csv", "json"] = "csv"
    regret: bool = False
    samples: int = Field(default=DEFAULT_MC_SAMPLES, ge=MIN_MC_SAMPLES)
    replications: int = Field(default=1, ge=1)

    def learning(self, noise_scale: float) -> LearningConfig:
        """σ обучения равна масштабу шума приращения h·σ сценария"""
        return LearningConfig(
            beta=self.beta,
            theta=self.theta,
            sigma=noise_scale,
            d=self.d,
            a0=self.a0_const,
            T0=self.t0,
            c_fallback=self.c_fallback,
            bound=self.learning_bound,
        )


CONFIG_KEYS = frozenset(RunConfig.model_fields)


def _normalize(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def read_config_file(path: Path) -> Dict[str, str]:
    """
    Прочитать плоский файл конфигурации

    Raises:
        ConfigError: файл не найден, строки без '=' или неизвестные ключи
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}", path=str(path))

    try:
        text = path.read_text()
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read config file: {e}", path=str(path)) from e

    problems: List[str] = []
    for number, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#") and "=" not in stripped:
            problems.append(f"line {number}: expected key=value, got {stripped!r}")

    values: Dict[str, str] = {}
    for key, value in dotenv_values(path).items():
        if value is None:
            # строка без '=' уже учтена выше
            continue
        name = _normalize(key)
        if name not in CONFIG_KEYS:
            problems.append(f"{key}: unknown key")
        elif value.strip() != "":
            values[name] = value.strip()

    if problems:
        raise ConfigError("invalid config file", path=str(path), problems=problems)
    return values


def format_validation_error(error: ValidationError) -> List[str]:
    """ValidationError → строки 'field: message'"""
    lines = []
    for item in error.errors():
        field = ".".join(str(part) for part in item["loc"]) or "config"
        lines.append(f"{field}: {item['msg']}")
    return lines


def build_run_config(
    path: Optional[Path] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """Файл + переопределения → RunConfig"""
    merged: Dict[str, Any] = dict(read_config_file(path)) if path is not None else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[_normalize(key)] = value
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as e:
        problems = format_validation_error(e)
        raise ConfigError("invalid run configuration", problems=problems) from e


def validate_config(path: Path) -> List[str]:
    """Пустой список, если конфигурация корректна"""
    try:
        build_run_config(path)
    except ConfigError as e:
        return list(e.context.get("problems") or [e.message])
    return []
