"""
Oscillator Scenario - Периодическая система с предельным циклом
===============================================================

x⁺ = A(x)x + h·u + h·w,
A(x) = [[1 + a0·h(1 − xᵀx),  b0·h], [−b0·h,  1 + a0·h(1 − xᵀx)]]

Опорный сигнал: та же структура с ±h вместо ±b0·h, без управления и шума.
Базис: два предиктора с b = 0 и b = 1, наклон по u равен h·I.
"""

import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.constants import (
    OSC_A0,
    OSC_B0,
    OSC_MU,
    OSC_PREDICTOR_B,
    OSC_REF_X0,
    OSC_SIGMA,
    OSC_U_BOUND,
    OSC_X0,
    STEP_H,
    TRACKING_TAIL_FRACTION,
)
from app.learning.ambiguity import AmbiguitySet
from app.learning.window import ObservationWindow, PredictorBasis, WindowPredictions
from app.objectives import Problem1Data, assemble_problem1
from app.scenarios.base import LossFn, Scenario
from app.scenarios.noise import sample_noise
from app.solver.projection import Box


class OscillatorParams(BaseModel):
    """Параметры осциллятора"""

    model_config = ConfigDict(frozen=True)

    a0_osc: float = Field(default=OSC_A0, gt=0.0)
    b0_osc: float = Field(default=OSC_B0, gt=0.0)
    h: float = Field(default=STEP_H, gt=0.0)
    sigma: float = Field(default=OSC_SIGMA, ge=0.0)
    x0: Tuple[float, float] = OSC_X0
    ref_x0: Tuple[float, float] = OSC_REF_X0
    u_bound: float = Field(default=OSC_U_BOUND, gt=0.0)


def _limit_cycle_map(x: np.ndarray, a0: float, b: float, h: float) -> np.ndarray:
    """A_b(x)·x для x формы (..., 2)"""
    x = np.asarray(x, dtype=float)
    radial = 1.0 + a0 * h * (1.0 - np.sum(x * x, axis=-1, keepdims=True))
    skew = np.stack([x[..., 1], -x[..., 0]], axis=-1)
    return radial * x + b * h * skew


def oscillator_step(x: np.ndarray, u: np.ndarray, w: np.ndarray, params: OscillatorParams) -> np.ndarray:
    return _limit_cycle_map(x, params.a0_osc, params.b0_osc, params.h) + params.h * (
        np.asarray(u, dtype=float) + np.asarray(w, dtype=float)
    )


def oscillator_reference_step(x_ref: np.ndarray, params: OscillatorParams) -> np.ndarray:
    return _limit_cycle_map(x_ref, params.a0_osc, 1.0, params.h)


def oscillator_basis(params: Optional[OscillatorParams] = None) -> PredictorBasis:
    """Предикторы A_b(x)x + h·u для b из OSC_PREDICTOR_B"""
    params = params or OscillatorParams()
    h, a0 = params.h, params.a0_osc

    def drift_for(b: float):
        return lambda t, x: _limit_cycle_map(x, a0, b, h)

    def slope(t, x):
        return np.broadcast_to(h * np.eye(2), (x.shape[0], 2, 2)).copy()

    return PredictorBasis(
        f1=[drift_for(b) for b in OSC_PREDICTOR_B],
        f2=[slope for _ in OSC_PREDICTOR_B],
        n=2,
        m=2,
        names=tuple(f"b={b:g}" for b in OSC_PREDICTOR_B),
    )


def estimated_frequency(alpha: np.ndarray) -> float:
    """Оценка b0 = Σ α_i b_i"""
    return float(np.dot(np.asarray(alpha, dtype=float), OSC_PREDICTOR_B))


class OscillatorScenario(Scenario):
    """Слежение за опорным сигналом периода 2π"""

    name = "oscillator"
    default_mu = OSC_MU
    n = 2
    m = 2

    def __init__(self, params: Optional[OscillatorParams] = None, control_weight: Optional[float] = None):
        self.params = params or OscillatorParams()
        # стоимость управления за шаг: λ = h, если не задано явно
        self.control_weight = control_weight if control_weight is not None else self.params.h
        self._basis = oscillator_basis(self.params)
        self._box = Box.symmetric(self.params.u_bound, 2)
        self._reference: List[np.ndarray] = [np.asarray(self.params.ref_x0, dtype=float)]

    @property
    def feasible(self) -> Box:
        return self._box

    def initial_state(self) -> np.ndarray:
        return np.asarray(self.params.x0, dtype=float)

    def initial_decision(self) -> np.ndarray:
        return np.zeros(self.m)

    def basis(self) -> PredictorBasis:
        return self._basis

    def step(self, t: int, x: np.ndarray, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        return oscillator_step(x, u, w, self.params)

    def noise(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        return sample_noise(rng, self.params.sigma, self.n, size=size)

    def reference(self, t: int) -> np.ndarray:
        """x̄_t (кэшируется по мере роста t)"""
        while len(self._reference) <= t:
            self._reference.append(oscillator_reference_step(self._reference[-1], self.params))
        return self._reference[t]

    def loss(self, t: int) -> LossFn:
        target = self.reference(t + 1)
        weight = self.control_weight

        def tracking_loss(u: np.ndarray, X: np.ndarray) -> np.ndarray:
            u = np.asarray(u, dtype=float)
            return 0.5 * weight * float(u @ u) + np.linalg.norm(np.atleast_2d(X) - target, axis=1)

        return tracking_loss

    def assemble(
        self,
        t: int,
        window: ObservationWindow,
        alpha: np.ndarray,
        ambiguity: AmbiguitySet,
        mu: float,
        predictions: WindowPredictions,
    ) -> Problem1Data:
        return assemble_problem1(
            window,
            self._basis,
            alpha,
            ambiguity,
            mu,
            reference=self.reference(t + 1),
            control_weight=self.control_weight,
            predictions=predictions,
        )

    def true_alpha(self, t: int = 0) -> np.ndarray:
        b0 = self.params.b0_osc
        return np.array([1.0 - b0, b0])

    def metrics(self, history: Dict[str, np.ndarray], warm_up: int) -> Dict[str, float]:
        states = history["states"]
        noises = history["noises"]
        horizon = noises.shape[0] - 1
        if horizon < 1:
            return {}

        baseline = np.empty_like(states)
        baseline[0] = states[0]
        zero = np.zeros(self.m)
        for t in range(noises.shape[0]):
            baseline[t + 1] = self.step(t, baseline[t], zero, noises[t])

        tail = max(1, int(math.ceil(TRACKING_TAIL_FRACTION * horizon)))
        rows = np.arange(horizon - tail + 1, horizon + 1)
        refs = np.stack([self.reference(int(t)) for t in rows])
        controlled = float(np.mean(np.sum((states[rows] - refs) ** 2, axis=1)))
        uncontrolled = float(np.mean(np.sum((baseline[rows] - refs) ** 2, axis=1)))

        return {
            "tracking_mse": controlled,
            "baseline_tracking_mse": uncontrolled,
            "tracking_ratio": uncontrolled / controlled if controlled > 0 else math.inf,
            "estimated_frequency": estimated_frequency(history["alpha"][-1]) if "alpha" in history else math.nan,
        }

    def to_dict(self) -> Dict:
        return {**super().to_dict(), **self.params.model_dump(), "control_weight": self.control_weight}


