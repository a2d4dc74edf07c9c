"""
Objectives Module - Целевые функции G_μ
=======================================

Компоненты:
- tracking: задача 1 (управление с опорным сигналом)
- allocation: задача 2 (распределение ресурсов)
"""

from typing import Union

import numpy as np

from app.core.constants import LIPSCHITZ_FLOOR
from app.core.errors import InvalidInputError
from app.core.logger import logger
from app.objectives.allocation import (
    Problem2Data,
    assemble_problem2,
    problem2_exact,
    problem2_value_grad,
)
from app.objectives.tracking import (
    Problem1Data,
    assemble_problem1,
    problem1_exact,
    problem1_value_grad,
)
from app.smoothing.envelopes import SmoothingParams

ProblemData = Union[Problem1Data, Problem2Data]

LIPSCHITZ_VARIANTS = ("certified", "nominal")


def lipschitz_grad_constant(data: ProblemData, variant: str = "certified") -> float:
    """
    Константа Липшица ∇G_μ

    certified: b/μ из пары сглаживания (оценка сверху)
    nominal: формулы сценариев с ‖·‖∞ и √s_i
    """
    if variant not in LIPSCHITZ_VARIANTS:
        raise InvalidInputError(f"unknown Lipschitz variant: {variant}")
    return data.lipschitz(variant)


def smoothing_params(data: ProblemData) -> SmoothingParams:
    """Пара (a, b): G_μ ≤ G ≤ G_μ + aμ, Lip(∇G_μ) ≤ b/μ"""
    return data.smoothing


def loss_lipschitz(data: ProblemData, u: np.ndarray) -> float:
    """L(u): 1 для задачи 1, ‖u‖/r0 для задачи 2"""
    return data.loss_lipschitz(u)


def time_lipschitz_sample(current: ProblemData, previous: ProblemData, u: np.ndarray) -> float:
    """|G_μ(k+1, u) − G_μ(k, u)| для оценки L̄"""
    return abs(current.value_grad(u).value - previous.value_grad(u).value)


def floored(lipschitz: float) -> float:
    """Нижняя граница перед обращением в размер шага"""
    if lipschitz < LIPSCHITZ_FLOOR:
        logger.debug(f"Lip(G_μ) = {lipschitz:.3e} below floor, using {LIPSCHITZ_FLOOR}")
        return LIPSCHITZ_FLOOR
    return lipschitz


__all__ = [
    "LIPSCHITZ_VARIANTS",
    "Problem1Data",
    "Problem2Data",
    "ProblemData",
    "assemble_problem1",
    "assemble_problem2",
    "floored",
    "lipschitz_grad_constant",
    "loss_lipschitz",
    "problem1_exact",
    "problem1_value_grad",
    "problem2_exact",
    "problem2_value_grad",
    "smoothing_params",
    "time_lipschitz_sample",
]
