"""
Accelerated Solver - Онлайн ускоренный проекционный градиент
============================================================

u_{t+1} = Π(y_t − ε_t ∇G_μ(t, y_t))
y_{t+1} = u_{t+1} + η_t (u_{t+1} − u_t)

δ_{−1} = 1,  δ_{t+1} = (1 + √(1 + 4δ_t²))/2,  η_t = (δ_{t−1} − 1)/δ_t

Проецируется только u; y может выходить из U.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Protocol, Tuple

import numpy as np

from app.core.constants import GOLDEN_DELTA
from app.core.errors import InvalidInputError, SimulationError, StepError
from app.core.logger import logger
from app.objectives import floored
from app.smoothing.envelopes import ValueGrad
from app.solver.projection import FeasibleSet, project

STEP_RULES = ("inverse-lipschitz", "monotone")


class Objective(Protocol):
    def value_grad(self, u: np.ndarray) -> ValueGrad: ...

    def lipschitz(self, variant: str = "certified") -> float: ...


@dataclass(frozen=True)
class SolverState:
    """Состояние (u_t, y_t, δ_{t−1}, δ_t, ε_{t−1})"""
    u: np.ndarray
    y: np.ndarray
    delta_prev: float
    delta: float
    t: int = 0
    step_size: Optional[float] = None


@dataclass(frozen=True)
class SolverRecord:
    t: int
    u: np.ndarray
    y: np.ndarray
    step_size: float
    eta: float
    value: float
    lipschitz: float
    delta_prev: float


@dataclass
class OnlineRun:
    initial: SolverState
    final: SolverState
    records: List[SolverRecord]


def initial_state(u0: np.ndarray, feasible: FeasibleSet) -> SolverState:
    """y_0 = u_0 = Π(u0), δ_{−1} = 1, δ_0 = (1+√5)/2"""
    u = project(feasible, np.asarray(u0, dtype=float))
    return SolverState(u=u, y=u.copy(), delta_prev=1.0, delta=GOLDEN_DELTA)


def momentum_next(delta_prev: float, delta: float) -> Tuple[float, float]:
    """(δ_{t−1}, δ_t) → (δ_{t+1}, η_t)"""
    if delta < 1.0:
        raise InvalidInputError("momentum scalar must be >= 1", delta=delta)
    delta_next = (1.0 + math.sqrt(1.0 + 4.0 * delta * delta)) / 2.0
    return delta_next, (delta_prev - 1.0) / delta


def step(
    state: SolverState,
    grad: np.ndarray,
    step_size: float,
    feasible: FeasibleSet,
) -> Tuple[SolverState, float]:
    """
    Один шаг системы (u, y)

    Returns:
        (новое состояние, использованный η_t)
    """
    if not step_size > 0.0:
        raise InvalidInputError("step size must be positive", step_size=step_size)
    grad = np.asarray(grad, dtype=float)
    if not np.all(np.isfinite(grad)):
        raise InvalidInputError("non-finite gradient", t=state.t)

    u_next = project(feasible, state.y - step_size * grad)
    delta_next, eta = momentum_next(state.delta_prev, state.delta)
    y_next = u_next + eta * (u_next - state.u)
    return (
        SolverState(
            u=u_next,
            y=y_next,
            delta_prev=state.delta,
            delta=delta_next,
            t=state.t + 1,
            step_size=step_size,
        ),
        eta,
    )


def next_step_size(rule: str, previous: Optional[float], lipschitz: float) -> float:
    """inverse-lipschitz: 1/Lip;  monotone: min(ε_{t−1}, 1/Lip) = min(ε_{t−1}, μ/b_t)"""
    candidate = 1.0 / floored(lipschitz)
    if rule == "inverse-lipschitz":
        return candidate
    if rule == "monotone":
        return candidate if previous is None else min(previous, candidate)
    raise InvalidInputError(f"unknown step rule: {rule}")


def run_online(
    assemble: Callable[[int, SolverState], Objective],
    feasible: FeasibleSet,
    horizon: int,
    u0: np.ndarray,
    step_rule: str = "inverse-lipschitz",
    inner_steps: int = 1,
    lipschitz_variant: str = "certified",
    on_decision: Optional[Callable[[int, SolverState, SolverRecord], None]] = None,
) -> OnlineRun:
    """
    Онлайн-цикл: собрать G_μ(t, ·) → inner_steps шагов → применить решение

    Args:
        assemble: t, текущее состояние → объект с value_grad и lipschitz
        on_decision: вызывается после каждого шага среды (применение u_t)
    """
    if inner_steps < 1:
        raise InvalidInputError("inner_steps must be >= 1", inner_steps=inner_steps)
    if step_rule not in STEP_RULES:
        raise InvalidInputError(f"unknown step rule: {step_rule}")

    state = initial_state(u0, feasible)
    initial = state
    records: List[SolverRecord] = []

    for t in range(1, horizon + 1):
        try:
            objective = assemble(t, state)
            lip = objective.lipschitz(lipschitz_variant)
            eta = 0.0
            for _ in range(inner_steps):
                eps = next_step_size(step_rule, state.step_size, lip)
                grad = objective.value_grad(state.y).grad
                state, eta = step(state, grad, eps, feasible)
            record = SolverRecord(
                t=t,
                u=state.u,
                y=state.y,
                step_size=state.step_size,
                eta=eta,
                value=objective.value_grad(state.u).value,
                lipschitz=lip,
                delta_prev=state.delta_prev,
            )
            records.append(record)
            if on_decision is not None:
                on_decision(t, state, record)
        except StepError:
            raise
        except (SimulationError, ValueError, np.linalg.LinAlgError, FloatingPointError) as e:
            raise StepError(t, e) from e

    if horizon > 0:
        logger.debug(f"Solver finished {horizon} steps, last ε = {state.step_size:.3e}")
    return OnlineRun(initial=initial, final=state, records=records)


__all__ = [
    "STEP_RULES",
    "Objective",
    "OnlineRun",
    "SolverRecord",
    "SolverState",
    "initial_state",
    "momentum_next",
    "next_step_size",
    "run_online",
    "step",
]
