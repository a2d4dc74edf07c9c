"""
Tracking Objective - Задача 1 (оптимальное управление)
======================================================

G_μ(t,u) = (λ/2)‖u‖² + (1/T) Σ_k F_μ(p_k(u)) + ε + (γ/T) Σ_i Σ_k F_μ(H_k^(i)(u))

p_k(u) = p_const_k + M·u,   H_k^(i)(u) = H_const_{k,i} − f2^(i)(t, x̂_t)·u
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core.errors import DimensionMismatchError
from app.learning.ambiguity import AmbiguitySet
from app.learning.window import ObservationWindow, PredictorBasis, WindowPredictions
from app.smoothing.envelopes import SmoothingParams, ValueGrad, moreau_l2_rows


@dataclass(frozen=True)
class Problem1Data:
    """Аффинные данные G_μ задачи 1"""
    M: np.ndarray            # (n, m)
    p_const: np.ndarray      # (T, n)
    H_const: np.ndarray      # (p, T, n)
    H_lin: np.ndarray        # (p, n, m)
    epsilon: float
    gamma: float
    mu: float
    s0: float
    s: np.ndarray            # (p,)
    control_weight: float = 1.0

    @property
    def T(self) -> int:
        return self.p_const.shape[0]

    @property
    def p(self) -> int:
        return self.H_const.shape[0]

    @property
    def m(self) -> int:
        return self.M.shape[1]

    @property
    def smoothing(self) -> SmoothingParams:
        return SmoothingParams(
            mu=self.mu,
            a=(1.0 + self.p * self.gamma) / 2.0,
            b=self.control_weight * self.mu + self.s0 + self.gamma * float(self.s.sum()),
        )

    def value_grad(self, u: np.ndarray) -> ValueGrad:
        return problem1_value_grad(self, u)

    def exact(self, u: np.ndarray) -> float:
        return problem1_exact(self, u)

    def lipschitz(self, variant: str = "certified") -> float:
        if variant == "certified":
            return self.smoothing.lipschitz
        # λ + s0/μ + γ Σ_i √s_i / μ
        return self.control_weight + (self.s0 + self.gamma * float(np.sqrt(self.s).sum())) / self.mu

    def loss_lipschitz(self, u: np.ndarray) -> float:
        return 1.0


def assemble_problem1(
    window: ObservationWindow,
    basis: PredictorBasis,
    alpha: np.ndarray,
    ambiguity: AmbiguitySet,
    mu: float,
    reference: Optional[np.ndarray] = None,
    control_weight: float = 1.0,
    predictions: Optional[WindowPredictions] = None,
) -> Problem1Data:
    """
    Собрать константы G_μ задачи 1

    Args:
        reference: опорный сигнал x̄_{t+1} (вычитается из p_k)
        control_weight: λ в (λ/2)‖u‖²
    """
    pred = predictions if predictions is not None else WindowPredictions.evaluate(window, basis)
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (basis.p,):
        raise DimensionMismatchError("alpha length differs from basis size", alpha=alpha.shape, p=basis.p)

    M = np.einsum("i,inm->nm", alpha, pred.slope_t)
    p_const = (
        np.einsum("i,in->n", alpha, pred.drift_t)[None, :]
        - np.einsum("i,ikn->kn", alpha, pred.f_k)
        + pred.next_states
    )
    if reference is not None:
        reference = np.asarray(reference, dtype=float)
        if reference.shape != (window.n,):
            raise DimensionMismatchError("reference dimension", got=reference.shape, n=window.n)
        p_const = p_const - reference[None, :]

    H_const = pred.f_k - pred.drift_t[:, None, :]
    s = np.array([np.linalg.norm(f2, 2) ** 2 for f2 in pred.slope_t])

    return Problem1Data(
        M=M,
        p_const=p_const,
        H_const=H_const,
        H_lin=pred.slope_t,
        epsilon=ambiguity.epsilon,
        gamma=ambiguity.gamma,
        mu=mu,
        s0=float(np.linalg.norm(M, 2) ** 2),
        s=s,
        control_weight=control_weight,
    )


def _affine_parts(data: Problem1Data, u: np.ndarray):
    P = data.p_const + (data.M @ u)[None, :]
    H = data.H_const - (data.H_lin @ u)[:, None, :]
    return P, H


def problem1_value_grad(data: Problem1Data, u: np.ndarray) -> ValueGrad:
    """Значение и точный градиент G_μ задачи 1"""
    u = np.asarray(u, dtype=float)
    if u.shape != (data.m,):
        raise DimensionMismatchError("control dimension", got=u.shape, m=data.m)
    P, H = _affine_parts(data, u)
    T, p = data.T, data.p

    p_vals, p_grads = moreau_l2_rows(P, data.mu)
    h_vals, h_grads = moreau_l2_rows(H.reshape(p * T, -1), data.mu)
    h_grads = h_grads.reshape(p, T, -1).sum(axis=1)          # (p, n)

    value = (
        0.5 * data.control_weight * float(u @ u)
        + float(p_vals.mean())
        + data.epsilon
        + data.gamma / T * float(h_vals.sum())
    )
    grad = (
        data.control_weight * u
        + data.M.T @ p_grads.mean(axis=0)
        - data.gamma / T * np.einsum("inm,in->m", data.H_lin, h_grads)
    )
    return ValueGrad(value=value, grad=grad)


def problem1_exact(data: Problem1Data, u: np.ndarray) -> float:
    """G задачи 1 с точными нормами"""
    u = np.asarray(u, dtype=float)
    P, H = _affine_parts(data, u)
    return (
        0.5 * data.control_weight * float(u @ u)
        + float(np.linalg.norm(P, axis=1).mean())
        + data.epsilon
        + data.gamma / data.T * float(np.linalg.norm(H, axis=2).sum())
    )
