"""
Allocation Scenario - Распределение ресурсов по трём активам
============================================================

x⁺ = x + h·A(t) + h·w,  третья компонента A(t) и w равна нулю (x₃ ≡ 1).
A(t) кусочно-постоянный: уровни доходности переходят между случайными
значениями из level_range за switch_interval шагов.

Решение: u из единичного симплекса, прибыль ⟨u, x⟩, цель r0.
"""

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.constants import (
    ALLOC_LEVEL_RANGE,
    ALLOC_MU,
    ALLOC_PREDICTOR_SHIFT,
    ALLOC_PROFIT_SLACK,
    ALLOC_R0,
    ALLOC_SIGMA,
    ALLOC_SWITCH_INTERVAL,
    STEP_H,
)
from app.core.errors import InvalidInputError
from app.core.logger import logger
from app.learning.ambiguity import AmbiguitySet
from app.learning.window import ObservationWindow, PredictorBasis, WindowPredictions
from app.objectives import Problem2Data, assemble_problem2
from app.scenarios.base import LossFn, Scenario
from app.scenarios.noise import sample_noise
from app.solver.projection import UnitSimplex

NOISE_MASK = (False, False, True)


class AllocationParams(BaseModel):
    """Параметры сценария распределения"""

    model_config = ConfigDict(frozen=True)

    h: float = Field(default=STEP_H, gt=0.0)
    sigma: float = Field(default=ALLOC_SIGMA, ge=0.0)
    r0: float = Field(default=ALLOC_R0, gt=0.0)
    switch_interval: int = Field(default=ALLOC_SWITCH_INTERVAL, ge=1)
    level_range: Tuple[float, float] = ALLOC_LEVEL_RANGE

    @model_validator(mode="after")
    def _check_levels(self) -> "AllocationParams":
        lo, hi = self.level_range
        if not lo < hi:
            raise ValueError("level_range must satisfy lo < hi")
        return self


@dataclass(frozen=True)
class DriftSchedule:
    """
    Кусочно-постоянный дрейф A(t)

    levels: (J+1, 2) уровни доходностей на границах отрезков
    values: (J, 3) дрейф на отрезке j, третья компонента нулевая
    """
    levels: np.ndarray
    values: np.ndarray
    interval: int

    @classmethod
    def generate(cls, horizon: int, params: AllocationParams, rng: np.random.Generator) -> "DriftSchedule":
        segments = max(1, math.ceil((horizon + 2) / params.switch_interval))
        levels = rng.uniform(*params.level_range, size=(segments + 1, 2))
        slopes = np.diff(levels, axis=0) / (params.h * params.switch_interval)
        values = np.column_stack([slopes, np.zeros(segments)])
        return cls(levels=levels, values=values, interval=params.switch_interval)

    @classmethod
    def constant(cls, drift: np.ndarray, levels: Tuple[float, float] = (1.0, 1.0)) -> "DriftSchedule":
        drift = np.asarray(drift, dtype=float)
        if drift.shape != (3,) or drift[2] != 0.0:
            raise InvalidInputError("drift must be (A1, A2, 0)", drift=drift)
        return cls(levels=np.array([levels]), values=drift[None, :], interval=1 << 62)

    @property
    def breakpoints(self) -> np.ndarray:
        return np.arange(self.values.shape[0]) * self.interval

    def __call__(self, t: int) -> np.ndarray:
        """A(t); после последнего отрезка дрейф нулевой"""
        j = int(t) // self.interval
        if j >= self.values.shape[0]:
            return np.zeros(3)
        return self.values[j]


def allocation_step(x: np.ndarray, w: np.ndarray, t: int, params: AllocationParams, drift: DriftSchedule) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if np.any(w[..., 2] != 0.0):
        raise InvalidInputError("third noise component must be zero")
    return np.asarray(x, dtype=float) + params.h * (drift(t) + w)


def allocation_basis(params: Optional[AllocationParams] = None) -> PredictorBasis:
    """f1 = x, x + 0.1h·e1, x + 0.1h·e2;  f2 ≡ 0"""
    params = params or AllocationParams()
    shift = ALLOC_PREDICTOR_SHIFT * params.h

    def drift_for(offset: np.ndarray):
        return lambda t, x: x + offset

    def no_control(t, x):
        return np.zeros((x.shape[0], 3, 3))

    offsets = [np.zeros(3), np.array([shift, 0.0, 0.0]), np.array([0.0, shift, 0.0])]
    return PredictorBasis(
        f1=[drift_for(o) for o in offsets],
        f2=[no_control] * 3,
        n=3,
        m=3,
        names=("hold", "shift_e1", "shift_e2"),
    )


def true_alpha(drift: np.ndarray) -> np.ndarray:
    """α, при котором базис воспроизводит x + hA: (1 − 10(A1+A2), 10A1, 10A2)"""
    scale = 1.0 / ALLOC_PREDICTOR_SHIFT
    a1, a2 = float(drift[0]), float(drift[1])
    return np.array([1.0 - scale * (a1 + a2), scale * a1, scale * a2])


class AllocationScenario(Scenario):
    """Выбор долей u ∈ Δ³ с целевой прибылью r0"""

    name = "allocation"
    default_mu = ALLOC_MU
    n = 3
    m = 3

    def __init__(
        self,
        params: Optional[AllocationParams] = None,
        horizon: int = 0,
        rng: Optional[np.random.Generator] = None,
        schedule: Optional[DriftSchedule] = None,
    ):
        self.params = params or AllocationParams()
        self.schedule = schedule or DriftSchedule.generate(horizon, self.params, rng or np.random.default_rng(0))
        self._basis = allocation_basis(self.params)
        self._simplex = UnitSimplex(3)
        logger.debug(f"Allocation drift schedule: {self.schedule.values.shape[0]} segments")

    @property
    def feasible(self) -> UnitSimplex:
        return self._simplex

    def initial_state(self) -> np.ndarray:
        first = self.schedule.levels[0]
        return np.array([first[0], first[1], 1.0])

    def initial_decision(self) -> np.ndarray:
        return self._simplex.center()

    def basis(self) -> PredictorBasis:
        return self._basis

    def step(self, t: int, x: np.ndarray, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        return allocation_step(x, w, t, self.params, self.schedule)

    def noise(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        return sample_noise(rng, self.params.sigma, self.n, zero_mask=NOISE_MASK, size=size)

    def loss(self, t: int) -> LossFn:
        r0 = self.params.r0

        def shortfall(u: np.ndarray, X: np.ndarray) -> np.ndarray:
            return np.maximum(0.0, 1.0 - np.atleast_2d(X) @ np.asarray(u, dtype=float) / r0)

        return shortfall

    def assemble(
        self,
        t: int,
        window: ObservationWindow,
        alpha: np.ndarray,
        ambiguity: AmbiguitySet,
        mu: float,
        predictions: WindowPredictions,
    ) -> Problem2Data:
        return assemble_problem2(window, self._basis, alpha, ambiguity, self.params.r0, mu, predictions=predictions)

    def true_alpha(self, t: int = 0) -> np.ndarray:
        return true_alpha(self.schedule(t))

    def metrics(self, history: Dict[str, np.ndarray], warm_up: int) -> Dict[str, float]:
        states = history["states"]
        controls = history["controls"]
        horizon = controls.shape[0] - 1
        if horizon < 1:
            return {}

        # прибыль решения u_t реализуется на x_{t+1}
        profit = np.einsum("tm,tm->t", controls[1:], states[2:])
        # цель достижима, только когда лучший рисковый актив выше r0 в момент решения
        reachable = states[1:-1, :2].max(axis=1) > self.params.r0
        start = warm_up if horizon > warm_up else 0
        settled, regime = profit[start:], reachable[start:]
        target = self.params.r0 - ALLOC_PROFIT_SLACK
        return {
            "mean_profit": float(profit.mean()),
            "final_profit": float(profit[-1]),
            "regime_steps": int(regime.sum()),
            "fraction_at_target": float(np.mean(settled[regime] >= target)) if regime.any() else math.nan,
        }

    def to_dict(self) -> Dict:
        return {**super().to_dict(), **self.params.model_dump()}
