"""
Simulation Module - Замкнутый цикл и отчёты
===========================================

Компоненты:
- run_config: RunConfig и чтение плоских файлов конфигурации
- engine: замкнутый цикл обучение → решатель → среда
- records: строки траектории
- reports: CSV/JSON
- replications: параллельные прогоны
"""

from app.simulation.engine import SimulationEngine, SimulationResult, build_scenario, run_simulation
from app.simulation.records import REGRET_COLUMNS, StepRow, TrajectoryRecord, trajectory_columns
from app.simulation.replications import replication_seeds, run_replications
from app.simulation.reports import FORMATS, ReportGenerator
from app.simulation.run_config import RunConfig, build_run_config, read_config_file, validate_config

__all__ = [
    "FORMATS",
    "REGRET_COLUMNS",
    "ReportGenerator",
    "RunConfig",
    "SimulationEngine",
    "SimulationResult",
    "StepRow",
    "TrajectoryRecord",
    "build_run_config",
    "build_scenario",
    "read_config_file",
    "replication_seeds",
    "run_replications",
    "run_simulation",
    "trajectory_columns",
    "validate_config",
]
