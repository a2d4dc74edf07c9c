"""
Projection - Евклидова проекция на допустимое множество
=======================================================

Box: покомпонентное отсечение.
UnitSimplex: сортировка и порог τ с Σ max(v_i − τ, 0) = 1.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from app.core.constants import SIMPLEX_SUM_TOL
from app.core.errors import DimensionMismatchError, InvalidInputError


@dataclass(frozen=True)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape:
            raise DimensionMismatchError("box bounds differ in shape", lo=lo.shape, hi=hi.shape)
        if np.any(lo > hi):
            raise InvalidInputError("box needs lo <= hi componentwise", lo=lo, hi=hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def symmetric(cls, bound: float, dim: int) -> "Box":
        return cls(lo=np.full(dim, -bound), hi=np.full(dim, bound))

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    def contains(self, v: np.ndarray, tol: float = 0.0) -> bool:
        return bool(np.all(v >= self.lo - tol) and np.all(v <= self.hi + tol))


@dataclass(frozen=True)
class UnitSimplex:
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInputError("simplex dimension must be positive", dim=self.dim)

    def contains(self, v: np.ndarray, tol: float = SIMPLEX_SUM_TOL) -> bool:
        return bool(np.all(v >= -tol) and abs(float(v.sum()) - 1.0) <= tol)

    def center(self) -> np.ndarray:
        return np.full(self.dim, 1.0 / self.dim)


FeasibleSet = Union[Box, UnitSimplex]


def project(feasible: FeasibleSet, v: np.ndarray) -> np.ndarray:
    """Π_U(v) = argmin_{z ∈ U} ‖v − z‖²/2"""
    v = np.asarray(v, dtype=float)
    if v.shape != (feasible.dim,):
        raise DimensionMismatchError("vector dimension differs from set", got=v.shape, dim=feasible.dim)
    if isinstance(feasible, Box):
        return np.clip(v, feasible.lo, feasible.hi)
    return _simplex_projection(v)


def _simplex_projection(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    ukvals = (np.cumsum(u) - 1.0) / np.arange(1, v.shape[0] + 1)
    k = np.nonzero(ukvals < u)[0][-1]
    tau = ukvals[k]
    z = np.maximum(v - tau, 0.0)
    # выравнивание суммы после округления
    z /= z.sum()
    return z
