"""
🔌 Базовый класс сценариев (истинная среда + базис предикторов)
"""
from abc import ABC, abstractmethod
from typing import Callable, Dict, Optional

import numpy as np

from app.core.constants import DEFAULT_SIGMA
from app.learning.ambiguity import AmbiguitySet
from app.learning.window import ObservationWindow, PredictorBasis, WindowPredictions
from app.objectives import ProblemData
from app.solver.projection import FeasibleSet

TruthSampler = Callable[[np.ndarray, int, np.random.Generator], np.ndarray]
LossFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


class Scenario(ABC):
    """Базовый класс для всех сценариев"""

    name: str = "base"
    default_mu: float = 0.1
    n: int = 0
    m: int = 0

    @property
    @abstractmethod
    def feasible(self) -> FeasibleSet:
        """Множество допустимых решений U"""

    @abstractmethod
    def initial_state(self) -> np.ndarray:
        """x̂_0"""

    @abstractmethod
    def initial_decision(self) -> np.ndarray:
        """u0 до проекции"""

    @abstractmethod
    def basis(self) -> PredictorBasis:
        """Базис предикторов"""

    @abstractmethod
    def step(self, t: int, x: np.ndarray, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Истинный переход x_{t+1}"""

    @abstractmethod
    def noise(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        """Шум w_t"""

    @abstractmethod
    def loss(self, t: int) -> LossFn:
        """ℓ(u, X) для выборки X формы (K, n) → (K,)"""

    @abstractmethod
    def assemble(
        self,
        t: int,
        window: ObservationWindow,
        alpha: np.ndarray,
        ambiguity: AmbiguitySet,
        mu: float,
        predictions: WindowPredictions,
    ) -> ProblemData:
        """Данные G_μ(t, ·)"""

    @abstractmethod
    def true_alpha(self, t: int) -> np.ndarray:
        """Веса, при которых базис воспроизводит истинную динамику"""

    @abstractmethod
    def metrics(self, history: Dict[str, np.ndarray], warm_up: int) -> Dict[str, float]:
        """
        Итоговые метрики прогона

        history: states (H+2, n), controls (H+1, m), noises (H+1, n);
        строка t соответствует x̂_t, u_t, w_t.
        """

    @property
    def noise_scale(self) -> float:
        """
        Масштаб шума приращения за шаг: h·σ

        При σ = 0 берётся h·DEFAULT_SIGMA, чтобы σ обучения оставалась положительной.
        """
        sigma = self.params.sigma if self.params.sigma > 0 else DEFAULT_SIGMA
        return float(self.params.h * sigma)

    def truth_sampler(self, t: int, x: np.ndarray) -> TruthSampler:
        """Выборка x_{t+1} ~ P_{t+1} при известном x_t"""
        x = np.asarray(x, dtype=float)

        def sample(u: np.ndarray, n_samples: int, rng: np.random.Generator) -> np.ndarray:
            w = self.noise(rng, size=n_samples)
            return self.step(t, x[None, :], np.asarray(u, dtype=float)[None, :], w)

        return sample

    def to_dict(self) -> Dict:
        return {"name": self.name, "n": self.n, "m": self.m}
