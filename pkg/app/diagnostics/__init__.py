"""
Diagnostics Module - Диагностика regret (только в симуляции)
"""

from app.diagnostics.regret import (
    OracleResult,
    RegretReport,
    RegretTracker,
    drift_bound,
    oracle_ustar,
    realized_regret,
    regret_bound,
    storage_value,
)

__all__ = [
    "OracleResult",
    "RegretReport",
    "RegretTracker",
    "drift_bound",
    "oracle_ustar",
    "realized_regret",
    "regret_bound",
    "storage_value",
]
