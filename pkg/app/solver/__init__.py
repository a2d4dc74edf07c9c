"""
Solver Module - Онлайн-решатель
===============================

Компоненты:
- projection: Box, UnitSimplex, project
- accelerated: momentum, шаг системы, онлайн-цикл
"""

from app.solver.accelerated import (
    STEP_RULES,
    OnlineRun,
    SolverRecord,
    SolverState,
    initial_state,
    momentum_next,
    next_step_size,
    run_online,
    step,
)
from app.solver.projection import Box, FeasibleSet, UnitSimplex, project

__all__ = [
    "STEP_RULES",
    "Box",
    "FeasibleSet",
    "OnlineRun",
    "SolverRecord",
    "SolverState",
    "UnitSimplex",
    "initial_state",
    "momentum_next",
    "next_step_size",
    "project",
    "run_online",
    "step",
]
