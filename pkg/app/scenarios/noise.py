"""
Noise - Источник суб-гауссовского шума
"""

from typing import Optional, Sequence

import numpy as np

from app.core.errors import DimensionMismatchError, InvalidInputError


def sample_noise(
    rng: np.random.Generator,
    sigma: float,
    n: int,
    zero_mask: Optional[Sequence[bool]] = None,
    size: Optional[int] = None,
) -> np.ndarray:
    """
    Гауссовский шум N(0, σ²I)

    Args:
        rng: генератор (numpy default_rng)
        sigma: масштаб σ ≥ 0
        n: размерность
        zero_mask: компоненты, которые всегда равны нулю
        size: число выборок; None → один вектор (n,)

    Returns:
        (n,) или (size, n)
    """
    if sigma < 0:
        raise InvalidInputError("noise scale must be nonnegative", sigma=sigma)
    shape = (n,) if size is None else (size, n)
    if sigma == 0:
        return np.zeros(shape)

    w = rng.normal(0.0, sigma, size=shape)
    if zero_mask is not None:
        mask = np.asarray(zero_mask, dtype=bool)
        if mask.shape != (n,):
            raise DimensionMismatchError("zero_mask length", got=mask.shape, n=n)
        w[..., mask] = 0.0
    return w
