"""
Smoothing Module - Сглаживание негладких слагаемых
==================================================
"""

from app.smoothing.envelopes import (
    SmoothingParams,
    ValueGrad,
    hinge,
    moreau_l1,
    moreau_l2,
    moreau_l2_rows,
    prox_oracle,
    smoothed_hinge,
)

__all__ = [
    "SmoothingParams",
    "ValueGrad",
    "hinge",
    "moreau_l1",
    "moreau_l2",
    "moreau_l2_rows",
    "prox_oracle",
    "smoothed_hinge",
]
