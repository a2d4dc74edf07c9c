"""
Window - Данные обучения
========================

Скользящее окно наблюдений, базис предикторов и параметры обучения.

Предикторы векторизованы: f1(t, x) получает t формы (K,) и x формы (K, n)
и возвращает (K, n); f2(t, x) возвращает (K, n, m).
"""

from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.constants import (
    DEFAULT_A0_CONST,
    DEFAULT_BETA,
    DEFAULT_D,
    DEFAULT_SIGMA,
    DEFAULT_T0,
    DEFAULT_THETA,
)
from app.core.errors import DimensionMismatchError, InvalidInputError

DriftFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
SlopeFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


class LearningConfig(BaseModel):
    """Параметры обучения множества неопределённости"""

    model_config = ConfigDict(frozen=True)

    beta: float = Field(default=DEFAULT_BETA, gt=0.0, lt=1.0)
    theta: float = Field(default=DEFAULT_THETA, ge=0.0)
    sigma: float = Field(default=DEFAULT_SIGMA, gt=0.0)
    d: float = Field(default=DEFAULT_D, gt=0.0)
    a0: float = Field(default=DEFAULT_A0_CONST, gt=0.0)
    T0: int = Field(default=DEFAULT_T0, ge=1)
    c_fallback: Optional[float] = Field(default=None, gt=0.0)
    # certified: c по формуле через σ_min(A); calibrated: по остаткам окна
    bound: Literal["certified", "calibrated"] = "certified"


@dataclass(frozen=True)
class ObservationWindow:
    """
    Окно I_t: состояния x̂_{t-T..t} и управления u_{t-T..t-1}

    Args:
        t: текущий момент времени
        states: (T+1, n)
        controls: (T, m)
    """
    t: int
    states: np.ndarray
    controls: np.ndarray

    def __post_init__(self):
        states = np.atleast_2d(np.asarray(self.states, dtype=float))
        controls = np.atleast_2d(np.asarray(self.controls, dtype=float))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "controls", controls)

        if self.t < 0:
            raise InvalidInputError("time index must be nonnegative", t=self.t)
        if controls.shape[0] < 1:
            raise InvalidInputError("window needs at least one transition", t=self.t)
        if states.shape[0] != controls.shape[0] + 1:
            raise DimensionMismatchError(
                "states must have exactly one more entry than controls",
                states=states.shape[0],
                controls=controls.shape[0],
            )
        if controls.shape[0] > self.t:
            raise InvalidInputError("window longer than elapsed time", t=self.t, T=controls.shape[0])

    @classmethod
    def from_history(
        cls,
        t: int,
        states: np.ndarray,
        controls: np.ndarray,
        T0: int,
    ) -> "ObservationWindow":
        """Хвост истории длины T = min(t, T0)"""
        T = min(t, T0)
        if T < 1:
            raise InvalidInputError("no data before t = 1", t=t)
        return cls(t=t, states=states[t - T: t + 1], controls=controls[t - T: t])

    @property
    def T(self) -> int:
        return self.controls.shape[0]

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def m(self) -> int:
        return self.controls.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.t - self.T, self.t)

    @property
    def current_state(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class PredictorBasis:
    """Базис control-affine предикторов f^(i) = f1^(i)(t, x) + f2^(i)(t, x)·u"""
    f1: Sequence[DriftFn]
    f2: Sequence[SlopeFn]
    n: int
    m: int
    names: Sequence[str] = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.f1) != len(self.f2):
            raise DimensionMismatchError("f1 and f2 lists differ in length", f1=len(self.f1), f2=len(self.f2))
        if not self.f1:
            raise InvalidInputError("basis is empty")

    @property
    def p(self) -> int:
        return len(self.f1)

    def drift(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        """f1 всех предикторов: (p, K, n)"""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.stack([np.asarray(f(t, x), dtype=float) for f in self.f1])
        if out.shape != (self.p, x.shape[0], self.n):
            raise DimensionMismatchError("f1 output shape", got=out.shape, expected=(self.p, x.shape[0], self.n))
        return out

    def slope(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        """f2 всех предикторов: (p, K, n, m)"""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.stack([np.asarray(f(t, x), dtype=float) for f in self.f2])
        if out.shape != (self.p, x.shape[0], self.n, self.m):
            raise DimensionMismatchError(
                "f2 output shape", got=out.shape, expected=(self.p, x.shape[0], self.n, self.m)
            )
        return out

    def evaluate(self, t: np.ndarray, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """f^(i)(t_k, x_k, u_k): (p, K, n)"""
        u = np.atleast_2d(np.asarray(u, dtype=float))
        return self.drift(t, x) + np.einsum("pknm,km->pkn", self.slope(t, x), u)

    def at(self, t: float, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Одна точка: (p, n)"""
        return self.evaluate(np.array([t]), np.asarray(x)[None, :], np.asarray(u)[None, :])[:, 0, :]


@dataclass(frozen=True)
class WindowPredictions:
    """
    Кэш значений предикторов на окне

    f_k: (p, T, n) значения f^(i)(k, x̂_k, u_k)
    next_states: (T, n) значения x̂_{k+1}
    drift_t: (p, n) значения f1^(i)(t, x̂_t)
    slope_t: (p, n, m) значения f2^(i)(t, x̂_t)
    """
    f_k: np.ndarray
    next_states: np.ndarray
    drift_t: np.ndarray
    slope_t: np.ndarray

    @classmethod
    def evaluate(cls, window: ObservationWindow, basis: PredictorBasis) -> "WindowPredictions":
        if window.n != basis.n or window.m != basis.m:
            raise DimensionMismatchError(
                "window and basis dimensions differ",
                window=(window.n, window.m),
                basis=(basis.n, basis.m),
            )
        f_k = basis.evaluate(window.times, window.states[:-1], window.controls)
        bad = ~np.isfinite(f_k).all(axis=2)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise InvalidInputError(
                f"non-finite predictor output at i={int(i)}, k={int(window.times[j])}",
                i=int(i),
                k=int(window.times[j]),
            )
        t_now = np.array([window.t], dtype=float)
        x_now = window.current_state[None, :]
        return cls(
            f_k=f_k,
            next_states=window.states[1:],
            drift_t=basis.drift(t_now, x_now)[:, 0, :],
            slope_t=basis.slope(t_now, x_now)[:, 0, :, :],
        )

    def current(self, u: np.ndarray) -> np.ndarray:
        """f^(i)(t, x̂_t, u): (p, n)"""
        return self.drift_t + self.slope_t @ np.asarray(u, dtype=float)
