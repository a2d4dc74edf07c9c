"""
Constants - Константы приложения
================================

Численные пороги и параметры сценариев по умолчанию в одном месте.
"""

import math
from typing import Tuple

# === Численные пороги ===
SVD_RELATIVE_CUTOFF: float = 1e-10     # "ненулевое" сингулярное число относительно σ_max
ALPHA_SUM_TOL: float = 1e-12           # |αᵀ1| ниже этого → распределение не определено
LIPSCHITZ_FLOOR: float = 1e-6          # нижняя граница Lip(G_μ) перед обращением в шаг
SIMPLEX_SUM_TOL: float = 1e-12

# === Обучение (LearningConfig) ===
DEFAULT_BETA: float = 0.05
DEFAULT_THETA: float = 0.1
DEFAULT_SIGMA: float = 1.0
DEFAULT_D: float = 1.0
DEFAULT_A0_CONST: float = 1.0
DEFAULT_T0: int = 500

# === Momentum ===
GOLDEN_DELTA: float = (1.0 + math.sqrt(5.0)) / 2.0   # δ_0 при δ_{-1} = 1

# === Oracle ===
ORACLE_TOL: float = 1e-8
ORACLE_MAX_ITER: int = 20_000
DEFAULT_MC_SAMPLES: int = 200
MIN_MC_SAMPLES: int = 100

# === Сценарий: осциллятор ===
STEP_H: float = 1e-3
OSC_A0: float = 0.1
OSC_B0: float = 0.5 * math.pi
OSC_SIGMA: float = 1.0
OSC_MU: float = 0.1
OSC_U_BOUND: float = 0.6
OSC_X0: Tuple[float, float] = (1.0, 0.0)
OSC_REF_X0: Tuple[float, float] = (1.0, 0.0)
OSC_PREDICTOR_B: Tuple[float, float] = (0.0, 1.0)   # b_1, b_2

# === Сценарий: распределение ресурсов ===
ALLOC_R0: float = 1.3
ALLOC_SIGMA: float = 0.1
ALLOC_MU: float = 0.01
ALLOC_PREDICTOR_SHIFT: float = 0.1   # f^(2) = x + 0.1 h e1, f^(3) = x + 0.1 h e2
ALLOC_SWITCH_INTERVAL: int = 2000
ALLOC_LEVEL_RANGE: Tuple[float, float] = (0.6, 1.8)
ALLOC_PROFIT_SLACK: float = 0.05

# === Метрики ===
TRACKING_TAIL_FRACTION: float = 0.2
PROGRESS_EVERY: int = 5000
