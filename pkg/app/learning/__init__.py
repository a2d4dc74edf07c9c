"""
Learning Module - Обучение модели среды
=======================================

Компоненты:
- window: окно наблюдений, базис предикторов, LearningConfig
- ambiguity: матрица Грама, α, множество неопределённости
"""

from app.learning.ambiguity import (
    AlphaEstimate,
    AmbiguitySet,
    GramResult,
    LearnedModel,
    build_ambiguity,
    build_gram,
    calibrated_constant,
    concentration_radius,
    confidence,
    confidence_alternate,
    drift_term,
    estimate_alpha,
    learn_model,
    prediction_points,
)
from app.learning.window import LearningConfig, ObservationWindow, PredictorBasis, WindowPredictions

__all__ = [
    "AlphaEstimate",
    "AmbiguitySet",
    "GramResult",
    "LearnedModel",
    "LearningConfig",
    "ObservationWindow",
    "PredictorBasis",
    "WindowPredictions",
    "build_ambiguity",
    "build_gram",
    "calibrated_constant",
    "concentration_radius",
    "confidence",
    "confidence_alternate",
    "drift_term",
    "estimate_alpha",
    "learn_model",
    "prediction_points",
]
