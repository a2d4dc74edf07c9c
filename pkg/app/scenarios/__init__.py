"""
Scenarios Module - Истинные среды для симуляции
===============================================

Сценарии:
- oscillator: слежение за опорным сигналом (задача 1, Box)
- allocation: распределение ресурсов (задача 2, симплекс)
"""

from app.scenarios.allocation import (
    AllocationParams,
    AllocationScenario,
    DriftSchedule,
    allocation_basis,
    allocation_step,
    true_alpha,
)
from app.scenarios.base import Scenario
from app.scenarios.noise import sample_noise
from app.scenarios.oscillator import (
    OscillatorParams,
    OscillatorScenario,
    estimated_frequency,
    oscillator_basis,
    oscillator_reference_step,
    oscillator_step,
)

SCENARIOS = ("oscillator", "allocation")

__all__ = [
    "SCENARIOS",
    "AllocationParams",
    "AllocationScenario",
    "DriftSchedule",
    "OscillatorParams",
    "OscillatorScenario",
    "Scenario",
    "allocation_basis",
    "allocation_step",
    "estimated_frequency",
    "oscillator_basis",
    "oscillator_reference_step",
    "oscillator_step",
    "sample_noise",
    "true_alpha",
]
