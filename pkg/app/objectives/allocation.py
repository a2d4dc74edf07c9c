"""
Allocation Objective - Задача 2 (распределение ресурсов)
=======================================================

G_μ(t,u) = (1/T) Σ_k F^S_μ(⟨u, p_k⟩ / r0) + (q/r0)·F_μ(u)

Среда не зависит от решения: все f2^(i) обязаны быть нулевыми.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core.errors import DimensionMismatchError, PreconditionError
from app.learning.ambiguity import AmbiguitySet
from app.learning.window import ObservationWindow, PredictorBasis, WindowPredictions
from app.smoothing.envelopes import SmoothingParams, ValueGrad, hinge, moreau_l2, smoothed_hinge


@dataclass(frozen=True)
class Problem2Data:
    """Данные G_μ задачи 2 (points и q не масштабированы на r0)"""
    points: np.ndarray      # (T, n)
    q: float
    r0: float
    mu: float
    epsilon: float = 0.0

    @property
    def T(self) -> int:
        return self.points.shape[0]

    @property
    def smoothing(self) -> SmoothingParams:
        q_scaled = self.q / self.r0
        spread = float((self.points ** 2).sum()) / (self.r0 ** 2 * self.T)
        return SmoothingParams(mu=self.mu, a=(1.0 + q_scaled) / 2.0, b=q_scaled + spread)

    def value_grad(self, u: np.ndarray) -> ValueGrad:
        return problem2_value_grad(self, u)

    def exact(self, u: np.ndarray) -> float:
        return problem2_exact(self, u)

    def lipschitz(self, variant: str = "certified") -> float:
        if variant == "certified":
            return self.smoothing.lipschitz
        sup = float((np.abs(self.points).max(axis=1) ** 2).sum())
        return self.q / self.r0 + sup / (self.r0 ** 2 * self.T)

    def loss_lipschitz(self, u: np.ndarray) -> float:
        return float(np.linalg.norm(u)) / self.r0


def assemble_problem2(
    window: ObservationWindow,
    basis: PredictorBasis,
    alpha: np.ndarray,
    ambiguity: AmbiguitySet,
    r0: float,
    mu: float,
    predictions: Optional[WindowPredictions] = None,
) -> Problem2Data:
    """
    p_k = x̂_{k+1} + Σ_i α_i (f1^(i)(t, x̂_t) − f1^(i)(k, x̂_k))
    q_t = ε + (γ/T) Σ_i Σ_k ‖f1^(i)(k, x̂_k) − f1^(i)(t, x̂_t)‖
    """
    if r0 <= 0:
        raise PreconditionError("target profit must be positive", r0=r0)

    pred = predictions if predictions is not None else WindowPredictions.evaluate(window, basis)
    slopes = basis.slope(window.times, window.states[:-1])
    if np.any(slopes != 0.0) or np.any(pred.slope_t != 0.0):
        raise PreconditionError("allocation problem needs a control-independent basis (f2 ≡ 0)")

    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (basis.p,):
        raise DimensionMismatchError("alpha length differs from basis size", alpha=alpha.shape, p=basis.p)

    # f2 ≡ 0, поэтому f_k совпадает с f1^(i)(k, x̂_k)
    diff = pred.f_k - pred.drift_t[:, None, :]
    points = pred.next_states - np.einsum("i,ikn->kn", alpha, diff)
    q = ambiguity.epsilon + ambiguity.gamma / window.T * float(np.linalg.norm(diff, axis=2).sum())

    return Problem2Data(points=points, q=q, r0=r0, mu=mu, epsilon=ambiguity.epsilon)


def problem2_value_grad(data: Problem2Data, u: np.ndarray) -> ValueGrad:
    """Значение и градиент G_μ задачи 2"""
    u = np.asarray(u, dtype=float)
    if u.shape != (data.points.shape[1],):
        raise DimensionMismatchError("decision dimension", got=u.shape, n=data.points.shape[1])

    s = data.points @ u / data.r0
    h_val, h_der = smoothed_hinge(s, data.mu)
    norm_part = moreau_l2(u, data.mu)
    q_scaled = data.q / data.r0

    value = float(h_val.mean()) + q_scaled * norm_part.value
    grad = data.points.T @ h_der / (data.T * data.r0) + q_scaled * norm_part.grad
    return ValueGrad(value=value, grad=grad)


def problem2_exact(data: Problem2Data, u: np.ndarray) -> float:
    """G задачи 2 с точными hinge и нормой"""
    u = np.asarray(u, dtype=float)
    s = data.points @ u / data.r0
    return float(hinge(s).mean()) + data.q / data.r0 * float(np.linalg.norm(u))
