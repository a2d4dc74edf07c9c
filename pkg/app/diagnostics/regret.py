"""
Regret Diagnostics - Оценка regret
==================================

Слагаемые оценки regret по скользящему окну:

    bound_t = 4W_t/(t+2)² + T·F_t + a·μ + L(u*)·ε̂

W_t собирается из функции накопления V_t(z) = zᵀH_t z,
H_t = (1/(2ε_{t−1}))·h hᵀ, h = (δ_{t−1}, 1−δ_{t−1}, δ_{t−1}),
z_t = (u_t − u*_t, u_{t−1} − u*_{t−1}, u*_t − u*_{t−1}).

u*_t и G*_t недоступны онлайн, поэтому диагностика работает только в симуляции.
"""

from collections import deque
from dataclasses import asdict, dataclass
from typing import Callable, Deque, Optional, Sequence, Tuple

import numpy as np

from app.core.constants import GOLDEN_DELTA, MIN_MC_SAMPLES, ORACLE_MAX_ITER, ORACLE_TOL
from app.core.errors import InvalidInputError
from app.core.logger import logger
from app.objectives import floored
from app.solver.accelerated import Objective, initial_state, step
from app.solver.projection import Box, FeasibleSet, project

TruthSampler = Callable[[np.ndarray, int, np.random.Generator], np.ndarray]
LossFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class RegretReport:
    """Диагностика одного шага"""
    t: int
    bound: float
    rho: float
    realized: float
    realized_se: float
    w_t: float
    f_t: float
    a_mu: float
    l_eps_hat: float
    w_bound_global: float
    w_bound_moving: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class OracleResult:
    u: np.ndarray
    value: float
    residual: float
    iterations: int
    converged: bool


def storage_value(z: np.ndarray, delta_prev: float, eps_prev: float) -> float:
    """
    V(z) = zᵀHz, блочно по координатам

    Args:
        z: три блока по m (форма (3, m) или плоский вектор длины 3m)
        delta_prev: δ_{t−1}
        eps_prev: ε_{t−1} > 0
    """
    if eps_prev <= 0:
        raise InvalidInputError("previous step size must be positive", eps_prev=eps_prev)
    blocks = np.asarray(z, dtype=float).reshape(3, -1)
    h = np.array([delta_prev, 1.0 - delta_prev, delta_prev])
    v = h @ blocks
    return float(v @ v) / (2.0 * eps_prev)


def regret_bound(
    optimal_values: Sequence[float],
    w_t: float,
    a_mu: float,
    l_ustar: float,
    eps_hat: float,
    l_bar: float,
    T: int,
    t: int,
) -> float:
    """4W/(t+2)² + T·F_t + aμ + L(u*)ε̂, F_t = max|G*_{k+1} − G*_k| + L̄"""
    if len(optimal_values) == 0:
        raise InvalidInputError("empty optimal-value history")
    return 4.0 * w_t / (t + 2) ** 2 + T * drift_bound(optimal_values, l_bar) + a_mu + l_ustar * eps_hat


def drift_bound(optimal_values: Sequence[float], l_bar: float) -> float:
    values = np.asarray(optimal_values, dtype=float)
    jumps = np.abs(np.diff(values))
    return (float(jumps.max()) if jumps.size else 0.0) + l_bar


def realized_regret(
    u: np.ndarray,
    u_star: np.ndarray,
    truth_sampler: TruthSampler,
    loss: LossFn,
    n_samples: int,
    seed: int = 0,
) -> Tuple[float, float]:
    """
    E[ℓ(u, x)] − E[ℓ(u*, x)] по парной выборке Монте-Карло

    truth_sampler(u, n, rng) → (n, dim) выборка следующего состояния;
    обе ветви получают генераторы с одинаковым seed.
    """
    if n_samples < MIN_MC_SAMPLES:
        raise InvalidInputError(
            f"n_samples must be at least {MIN_MC_SAMPLES}", n_samples=n_samples, minimum=MIN_MC_SAMPLES
        )
    x_u = truth_sampler(np.asarray(u, dtype=float), n_samples, np.random.default_rng(seed))
    x_star = truth_sampler(np.asarray(u_star, dtype=float), n_samples, np.random.default_rng(seed))
    diff = np.asarray(loss(u, x_u), dtype=float) - np.asarray(loss(u_star, x_star), dtype=float)

    if np.all(diff == diff[0]):
        return float(diff[0]), 0.0
    return float(diff.mean()), float(diff.std(ddof=1) / np.sqrt(n_samples))


def oracle_ustar(
    objective: Objective,
    feasible: FeasibleSet,
    tol: float = ORACLE_TOL,
    max_iter: int = ORACLE_MAX_ITER,
    u0: Optional[np.ndarray] = None,
    lipschitz: Optional[float] = None,
) -> OracleResult:
    """
    Офлайн-минимизатор G(t, ·) ускоренным проекционным градиентом с рестартом

    Критерий остановки: ‖u − Π(u − ∇G(u))‖ ≤ tol.
    При исчерпании итераций возвращается лучшая точка с converged=False.
    """
    L = floored(lipschitz if lipschitz is not None else objective.lipschitz("certified"))
    if u0 is None:
        u0 = np.zeros(feasible.dim) if isinstance(feasible, Box) else feasible.center()
    state = initial_state(u0, feasible)

    best_u, best_val = state.u, objective.value_grad(state.u).value
    last_val = best_val
    residual = np.inf
    for it in range(1, max_iter + 1):
        g = objective.value_grad(state.y).grad
        state, _ = step(state, g, 1.0 / L, feasible)

        at_u = objective.value_grad(state.u)
        if at_u.value > last_val:
            # рестарт momentum при росте значения
            state = initial_state(state.u, feasible)
        last_val = at_u.value
        if at_u.value < best_val:
            best_u, best_val = state.u, at_u.value
        residual = float(np.linalg.norm(state.u - project(feasible, state.u - at_u.grad)))
        if residual <= tol:
            return OracleResult(u=state.u, value=at_u.value, residual=residual, iterations=it, converged=True)

    logger.warning(f"⚠️ oracle_ustar hit iteration cap ({max_iter}), residual {residual:.2e}")
    return OracleResult(u=best_u, value=best_val, residual=residual, iterations=max_iter, converged=False)


@dataclass
class _Entry:
    t: int
    u: np.ndarray
    u_star: np.ndarray
    eps_prev: float
    delta_prev: float
    g_star: float
    gap: float
    time_drift: float
    storage: float = 0.0


class RegretTracker:
    """
    Накопитель диагностики по шагам

    Args:
        T0: горизонт окна
        u0: начальное решение (u_0)
    """

    def __init__(self, T0: int, u0: np.ndarray):
        self.T0 = T0
        self.u0 = np.asarray(u0, dtype=float)
        self.entries: Deque[_Entry] = deque(maxlen=T0 + 2)
        self.first: Optional[_Entry] = None

    def observe(
        self,
        t: int,
        u: np.ndarray,
        u_star: np.ndarray,
        eps_prev: float,
        delta_prev: float,
        g_star: float,
        value: float,
        time_drift: float = 0.0,
    ) -> None:
        """Записать шаг t: решение, оптимум, ε_{t−1}, δ_{t−1}, G*_t, G_μ(t, u_t)"""
        entry = _Entry(
            t=t,
            u=np.asarray(u, dtype=float),
            u_star=np.asarray(u_star, dtype=float),
            eps_prev=eps_prev,
            delta_prev=delta_prev,
            g_star=g_star,
            gap=max(value - g_star, 0.0),
            time_drift=abs(time_drift),
        )
        if self.entries:
            prev_u, prev_star = self.entries[-1].u, self.entries[-1].u_star
        else:
            # до первого шага оптимум считается неподвижным
            prev_u, prev_star = self.u0, entry.u_star
        z = np.stack([entry.u - entry.u_star, prev_u - prev_star, entry.u_star - prev_star])
        entry.storage = storage_value(z, delta_prev, eps_prev)

        self.entries.append(entry)
        if self.first is None:
            self.first = entry

    def _entry(self, t: int) -> _Entry:
        offset = t - self.entries[0].t
        return self.entries[offset]

    def report(
        self,
        t: int,
        a_mu: float,
        l_ustar: float,
        eps_hat: float,
        rho: float,
        realized: float = float("nan"),
        realized_se: float = float("nan"),
    ) -> Optional[RegretReport]:
        """Оценка для последнего записанного шага; None при t < 2"""
        if t < 2 or not self.entries or self.entries[-1].t != t:
            return None
        T = min(t - 1, self.T0)
        start = t - T
        window = [self._entry(k) for k in range(start, t)]
        now = self._entry(t)

        energy_change = sum(
            (1.0 - e.eps_prev / self._entry(e.t + 1).eps_prev) * e.storage for e in window
        )
        head = window[0]
        w_t = (
            head.storage
            - now.storage
            - energy_change
            + (t - T - 1 + GOLDEN_DELTA) ** 2 * head.gap
        )

        l_bar = max(self._entry(k).time_drift for k in range(start + 1, t + 1))
        optimal = [self._entry(k).g_star for k in range(start, t + 1)]
        f_t = drift_bound(optimal, l_bar)
        first = self.first

        return RegretReport(
            t=t,
            bound=regret_bound(optimal, w_t, a_mu, l_ustar, eps_hat, l_bar, T, t),
            rho=rho,
            realized=realized,
            realized_se=realized_se,
            w_t=w_t,
            f_t=f_t,
            a_mu=a_mu,
            l_eps_hat=l_ustar * eps_hat,
            w_bound_global=first.storage + GOLDEN_DELTA ** 2 * first.gap,
            w_bound_moving=head.storage + t ** 2 * head.gap,
        )
