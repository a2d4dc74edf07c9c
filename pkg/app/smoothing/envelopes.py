"""
Envelopes - Сглаживание Моро
============================

Замкнутые формы огибающих Моро–Иосиды:
- moreau_l2: ‖x‖, параметры (1/2, 1)
- moreau_l1: ‖u‖₁ (Huber по компонентам), параметры (m/2, 1)
- smoothed_hinge: switch-функция max(0, 1 − s), параметры (1/2, 1)

prox_oracle численно минимизирует F(z) + ‖z − x‖²/(2μ) и служит
независимой проверкой замкнутых форм.
"""

from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from app.core.errors import InvalidInputError


@dataclass(frozen=True)
class SmoothingParams:
    """F_μ ≤ F ≤ F_μ + a·μ, Lip(∇F_μ) = b/μ"""
    mu: float
    a: float
    b: float

    def __post_init__(self):
        if self.mu <= 0:
            raise InvalidInputError("smoothing scale must be positive", mu=self.mu)
        if self.a < 0 or self.b < 0:
            raise InvalidInputError("invalid smoothing pair", a=self.a, b=self.b)

    @property
    def gap(self) -> float:
        return self.a * self.mu

    @property
    def lipschitz(self) -> float:
        return self.b / self.mu


@dataclass(frozen=True)
class ValueGrad:
    value: float
    grad: np.ndarray


def _check_mu(mu: float):
    if mu <= 0:
        raise InvalidInputError("smoothing scale must be positive", mu=mu)


def moreau_l2_rows(X: np.ndarray, mu: float) -> Tuple[np.ndarray, np.ndarray]:
    """Огибающая ‖·‖ для каждой строки X: значения (K,) и градиенты (K, n)"""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    norms = np.linalg.norm(X, axis=1)
    inner = norms <= mu
    values = np.where(inner, norms ** 2 / (2.0 * mu), norms - mu / 2.0)
    denom = np.where(inner, mu, np.where(norms > 0, norms, 1.0))
    return values, X / denom[:, None]


def moreau_l2(x: np.ndarray, mu: float) -> ValueGrad:
    """
    F_μ(x) = ‖x‖²/(2μ) при ‖x‖ ≤ μ, иначе ‖x‖ − μ/2

    На границе ‖x‖ = μ используется квадратичная ветвь.
    """
    _check_mu(mu)
    x = np.asarray(x, dtype=float)
    values, grads = moreau_l2_rows(x.reshape(1, -1), mu)
    return ValueGrad(value=float(values[0]), grad=grads[0].reshape(x.shape))


def moreau_l1(u: np.ndarray, mu: float) -> ValueGrad:
    """Σ_i F_μ(u_i): скалярная огибающая по каждой компоненте"""
    _check_mu(mu)
    u = np.asarray(u, dtype=float)
    values, grads = moreau_l2_rows(u.reshape(-1, 1), mu)
    return ValueGrad(value=float(values.sum()), grad=grads[:, 0].reshape(u.shape))


def smoothed_hinge(s: Union[float, np.ndarray], mu: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    F^S_μ(s): 1 − s − μ/2 при s ≤ 1 − μ; (1 − s)²/(2μ) при 1 − μ ≤ s < 1; 0 при s ≥ 1

    Работает поэлементно; для скаляра возвращает 0-мерные массивы.

    Returns:
        (value, derivative)
    """
    _check_mu(mu)
    s = np.asarray(s, dtype=float)
    gap = 1.0 - s
    linear = s < 1.0 - mu
    flat = s >= 1.0
    value = np.where(linear, gap - mu / 2.0, np.where(flat, 0.0, gap ** 2 / (2.0 * mu)))
    deriv = np.where(linear, -1.0, np.where(flat, 0.0, -gap / mu))
    return value, deriv


def hinge(s: Union[float, np.ndarray]) -> np.ndarray:
    """Несглаженная switch-функция max(0, 1 − s)"""
    return np.maximum(0.0, 1.0 - np.asarray(s, dtype=float))


def prox_oracle(
    F: Callable,
    x: Union[float, np.ndarray],
    mu: float,
    grid: float = 1e-2,
    mode: str = "auto",
) -> float:
    """
    Численная огибающая min_z F(z) + ‖z − x‖²/(2μ)

    Args:
        F: выпуклая функция (скалярная или векторная)
        x: точка
        mu: масштаб сглаживания
        grid: шаг грубой сетки перед уточнением
        mode: "scalar", "radial" (поиск вдоль луча через начало координат)
              или "separable" (F применяется к каждой компоненте, результаты суммируются)

    Returns:
        значение огибающей
    """
    _check_mu(mu)
    x_arr = np.asarray(x, dtype=float)
    if mode == "auto":
        mode = "scalar" if x_arr.size == 1 and x_arr.ndim == 0 else "radial"

    if mode == "scalar":
        return _scalar_envelope(F, float(x_arr), mu, grid, half_width=3.0 * mu)
    if mode == "separable":
        return float(sum(_scalar_envelope(F, float(xi), mu, grid, half_width=3.0 * mu) for xi in x_arr.ravel()))
    if mode == "radial":
        return _radial_envelope(F, x_arr.ravel(), mu, grid)
    raise InvalidInputError(f"unknown oracle mode: {mode}")


def _scalar_envelope(F: Callable, x: float, mu: float, grid: float, half_width: float) -> float:
    def objective(z: float) -> float:
        return float(F(z)) + (z - x) ** 2 / (2.0 * mu)

    return _grid_then_refine(objective, x - half_width, x + half_width, grid)


def _radial_envelope(F: Callable, x: np.ndarray, mu: float, grid: float) -> float:
    radius = float(np.linalg.norm(x))
    direction = x / radius if radius > 0 else np.eye(x.size)[0]
    half_width = 3.0 * mu * np.sqrt(x.size)

    def objective(s: float) -> float:
        z = s * direction
        return float(F(z)) + float(np.sum((z - x) ** 2)) / (2.0 * mu)

    return _grid_then_refine(objective, radius - half_width, radius + half_width, grid)


def _grid_then_refine(objective: Callable[[float], float], lo: float, hi: float, grid: float) -> float:
    # грубая сетка, затем ограниченный поиск Брента (золотое сечение + парабола)
    n_points = max(int(np.ceil((hi - lo) / grid)) + 1, 3)
    zs = np.linspace(lo, hi, n_points)
    values = np.array([objective(z) for z in zs])
    i = int(np.argmin(values))
    left, right = zs[max(i - 1, 0)], zs[min(i + 1, n_points - 1)]
    if right - left <= 0:
        return float(values[i])
    res = minimize_scalar(objective, bounds=(left, right), method="bounded", options={"xatol": 1e-12})
    return float(min(res.fun, values[i]))
