"""
Errors - Иерархия исключений
============================

Каждое исключение несёт стабильный code и контекст для машинно-читаемой
записи об ошибке (см. cli.py).
"""

from typing import Any, Dict


class SimulationError(Exception):
    """Базовая ошибка симулятора"""

    code = "simulation_error"

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> Dict[str, Any]:
        return {
            "code": self.code,
            "message": self.message,
            "context": {k: _plain(v) for k, v in self.context.items()},
        }


class InvalidInputError(SimulationError, ValueError):
    code = "invalid_input"


class DimensionMismatchError(InvalidInputError):
    code = "dimension_mismatch"


class DegenerateAlphaSumError(SimulationError):
    code = "degenerate_alpha_sum"


class RankDeficientGramError(SimulationError):
    code = "rank_deficient_gram"


class PreconditionError(SimulationError):
    code = "precondition_violation"


class ConfigError(SimulationError):
    code = "config_error"


class ExportError(SimulationError):
    code = "export_error"


class StepError(SimulationError):
    """Ошибка модуля с привязкой к шагу симуляции"""

    code = "step_error"

    def __init__(self, step: int, cause: Exception):
        super().__init__(f"step {step}: {cause}", step=step)
        self.step = step
        self.cause = cause

    def to_dict(self) -> Dict[str, Any]:
        record = super().to_dict()
        if isinstance(self.cause, SimulationError):
            record["cause"] = self.cause.to_dict()
        else:
            record["cause"] = {"code": type(self.cause).__name__, "message": str(self.cause)}
        return record


def _plain(value: Any) -> Any:
    # numpy массивы/скаляры и кортежи → JSON-совместимые значения
    if hasattr(value, "tolist") and callable(value.tolist):
        return value.tolist()
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value
