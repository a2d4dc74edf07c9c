"""
Ambiguity Learning - Обучение множества неопределённости
========================================================

По окну наблюдений строит:
- матрицу Грама A и вектор b
- оценку α = A⁺b (псевдообратная через SVD)
- константы c, γ (формула через σ_min(A) или калибровка по остаткам окна)
- эмпирическое распределение (T опорных точек) с радиусом ε̂ и доверием ρ

Все функции чистые: результат зависит только от входов.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from app.core.constants import ALPHA_SUM_TOL, SVD_RELATIVE_CUTOFF
from app.core.errors import DegenerateAlphaSumError, DimensionMismatchError, RankDeficientGramError
from app.core.logger import logger
from app.learning.window import LearningConfig, ObservationWindow, PredictorBasis, WindowPredictions


@dataclass(frozen=True)
class GramResult:
    """A, b и выбранные масштабы P_k = scale_k·I"""
    A: np.ndarray
    b: np.ndarray
    regularizers: np.ndarray


@dataclass(frozen=True)
class AlphaEstimate:
    alpha: np.ndarray
    sigma_min: float
    sigma_max: float
    rank: int
    degenerate: bool = False


@dataclass(frozen=True)
class LearnedModel:
    """Обученная модель среды"""
    A: np.ndarray
    b: np.ndarray
    alpha: np.ndarray
    sigma_min: float
    c: Optional[float]
    gamma: Optional[float]
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha.tolist(),
            "sigma_min": self.sigma_min,
            "c": self.c,
            "gamma": self.gamma,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class AmbiguitySet:
    """
    Шар Вассерштейна вокруг эмпирического распределения

    support: (T, n) точки ξ̄_k, каждая с массой 1/T
    """
    support: np.ndarray
    radius: float
    epsilon: float
    H: float
    rho: float
    rho_alternate: float
    gamma: float

    @property
    def weights(self) -> np.ndarray:
        T = self.support.shape[0]
        return np.full(T, 1.0 / T)


def _predictions(
    window: ObservationWindow,
    basis: PredictorBasis,
    predictions: Optional[WindowPredictions],
) -> WindowPredictions:
    return predictions if predictions is not None else WindowPredictions.evaluate(window, basis)


def build_gram(
    window: ObservationWindow,
    basis: PredictorBasis,
    d: float,
    predictions: Optional[WindowPredictions] = None,
) -> GramResult:
    """
    A(i,j) = (1/T) Σ_k ⟨f_k^(j), P_k f_k^(i)⟩,  b(i) = (1/T) Σ_k ⟨x̂_{k+1}, P_k f_k^(i)⟩

    P_k = min(1, d / max_i ‖f_k^(i)‖)·I, так что ‖P_k f_k^(i)‖ ≤ d.
    """
    pred = _predictions(window, basis, predictions)
    f_k = pred.f_k                                     # (p, T, n)
    T = f_k.shape[1]

    norms = np.linalg.norm(f_k, axis=2).max(axis=0)    # (T,)
    with np.errstate(divide="ignore"):
        scale = np.where(norms > d, d / np.where(norms > 0, norms, 1.0), 1.0)

    scaled = f_k * scale[None, :, None]
    A = np.einsum("jkn,ikn->ij", f_k, scaled) / T
    A = 0.5 * (A + A.T)
    b = np.einsum("kn,ikn->i", pred.next_states, scaled) / T
    return GramResult(A=A, b=b, regularizers=scale)


def estimate_alpha(A: np.ndarray, b: np.ndarray) -> AlphaEstimate:
    """α = A⁺b с относительным порогом 1e-10·σ_max"""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
        raise DimensionMismatchError("A must be p×p and b of length p", A=A.shape, b=b.shape)

    U, s, Vt = np.linalg.svd(A)
    sigma_max = float(s[0]) if s.size else 0.0
    if sigma_max == 0.0:
        return AlphaEstimate(
            alpha=np.zeros_like(b), sigma_min=0.0, sigma_max=0.0, rank=0, degenerate=True
        )

    keep = s > SVD_RELATIVE_CUTOFF * sigma_max
    s_inv = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    alpha = Vt.T @ (s_inv * (U.T @ b))
    return AlphaEstimate(
        alpha=alpha,
        sigma_min=float(s[keep].min()),
        sigma_max=sigma_max,
        rank=int(keep.sum()),
    )


def learning_constant(n: int, p: int, sigma_min: float, cfg: LearningConfig) -> float:
    """c = σ·e·d·√(np) / σ_min(A)"""
    if sigma_min <= 0.0:
        raise RankDeficientGramError("rank-deficient Gram: c undefined", sigma_min=sigma_min)
    return cfg.sigma * math.e * cfg.d * math.sqrt(n * p) / sigma_min


def calibrated_constant(
    pred: WindowPredictions,
    gram: GramResult,
    alpha: np.ndarray,
    cfg: LearningConfig,
) -> float:
    """
    c = z·max_i se(α̂_i), se из сэндвич-ковариации оценки по остаткам окна

    r_k = x̂_{k+1} − Σ_i α̂_i f_k^(i),  σ̂² = Σ_k ‖r_k‖² / (nT − p)
    Cov(α̂) = σ̂²·A⁺ B A⁺ / T,  B = (1/T) Σ_k s_k² F_kᵀF_k
    z = √(2 ln(2p/β)): одновременная граница для p координат с вероятностью 1 − β.

    При nT ≤ p остатки не информативны и вместо σ̂ берётся cfg.sigma.
    """
    f_k = pred.f_k                                     # (p, T, n)
    p, T, n = f_k.shape
    residuals = pred.next_states - np.einsum("i,ikn->kn", alpha, f_k)
    dof = n * T - p
    sigma2 = float(np.sum(residuals ** 2)) / dof if dof > 0 else cfg.sigma ** 2

    scaled = f_k * gram.regularizers[None, :, None]
    B = np.einsum("ikn,jkn->ij", scaled, scaled) / T
    A_pinv = np.linalg.pinv(gram.A, rcond=SVD_RELATIVE_CUTOFF, hermitian=True)
    cov = sigma2 * (A_pinv @ B @ A_pinv) / T
    z = math.sqrt(2.0 * math.log(2.0 * p / cfg.beta))
    return z * math.sqrt(max(float(np.max(np.diag(cov))), 0.0))


def learn_model(
    window: ObservationWindow,
    basis: PredictorBasis,
    cfg: LearningConfig,
    predictions: Optional[WindowPredictions] = None,
) -> LearnedModel:
    """Окно → A, b → α → c, γ"""
    pred = _predictions(window, basis, predictions)
    gram = build_gram(window, basis, cfg.d, predictions=pred)
    est = estimate_alpha(gram.A, gram.b)

    c: Optional[float] = None
    gamma: Optional[float] = None
    if est.sigma_min > 0.0:
        if cfg.bound == "calibrated":
            c = calibrated_constant(pred, gram, est.alpha, cfg)
        else:
            c = learning_constant(window.n, basis.p, est.sigma_min, cfg)
        gamma = window.n * c + cfg.theta

    return LearnedModel(
        A=gram.A,
        b=gram.b,
        alpha=est.alpha,
        sigma_min=est.sigma_min,
        c=c,
        gamma=gamma,
        degenerate=est.degenerate,
    )


def prediction_points(
    window: ObservationWindow,
    basis: PredictorBasis,
    alpha: np.ndarray,
    u: np.ndarray,
    predictions: Optional[WindowPredictions] = None,
) -> np.ndarray:
    """
    ξ_k^(i) = f^(i)(t, x̂_t, u) + x̂_{k+1}/(αᵀ1) − f_k^(i),  ξ̄_k = Σ_i α_i ξ_k^(i)

    Returns:
        (T, n) опорные точки
    """
    alpha = np.asarray(alpha, dtype=float)
    alpha_sum = float(alpha.sum())
    if abs(alpha_sum) <= ALPHA_SUM_TOL:
        raise DegenerateAlphaSumError("degenerate alpha sum", alpha_sum=alpha_sum)

    pred = _predictions(window, basis, predictions)
    xi = pred.current(u)[:, None, :] + pred.next_states[None, :, :] / alpha_sum - pred.f_k
    return np.einsum("i,ikn->kn", alpha, xi)


def concentration_radius(n: int, T: int, cfg: LearningConfig) -> float:
    """ε = sqrt(2nσ²/T · ln(1/β)) + a0·T^(−1/max(n,2))"""
    return math.sqrt(2.0 * n * cfg.sigma ** 2 / T * math.log(1.0 / cfg.beta)) + cfg.a0 * T ** (
        -1.0 / max(n, 2)
    )


def drift_term(predictions: WindowPredictions, u: np.ndarray) -> float:
    """H = (1/T) Σ_i Σ_k ‖f_k^(i) − f^(i)(t, x̂_t, u)‖"""
    T = predictions.f_k.shape[1]
    diff = predictions.f_k - predictions.current(u)[:, None, :]
    return float(np.linalg.norm(diff, axis=2).sum() / T)


def _confidence(exponent_num: float, T: int, n: int, c: float, gamma: float, beta: float) -> float:
    denom = 2.0 * ((2 * T - 1) * c * gamma + n * c ** 2)
    if denom <= 0.0:
        return 1.0 - beta if exponent_num > 0.0 else 0.0
    return (1.0 - beta) * (1.0 - math.exp(-exponent_num * T ** 2 / denom))


def confidence(theta: float, T: int, n: int, c: float, gamma: float, beta: float) -> float:
    """ρ = (1−β)(1 − exp(−θ²T² / (2[(2T−1)cγ + nc²])))"""
    return _confidence(theta ** 2, T, n, c, gamma, beta)


def confidence_alternate(T: int, n: int, c: float, gamma: float, beta: float) -> float:
    """Тот же ρ, но с (nc − γ)² в показателе"""
    return _confidence((n * c - gamma) ** 2, T, n, c, gamma, beta)


def build_ambiguity(
    window: ObservationWindow,
    basis: PredictorBasis,
    alpha: np.ndarray,
    model: LearnedModel,
    cfg: LearningConfig,
    u: np.ndarray,
    predictions: Optional[WindowPredictions] = None,
) -> AmbiguitySet:
    """Множество P_{t+1}: опорные точки, ε̂ = ε + γH, ρ"""
    c, gamma = _resolve_constants(window.n, model, cfg)
    pred = _predictions(window, basis, predictions)
    T, n = window.T, window.n

    support = prediction_points(window, basis, alpha, u, predictions=pred)
    epsilon = concentration_radius(n, T, cfg)
    H = drift_term(pred, u)
    rho = confidence(cfg.theta, T, n, c, gamma, cfg.beta)
    rho_alt = confidence_alternate(T, n, c, gamma, cfg.beta)
    if not math.isclose(rho, rho_alt, rel_tol=1e-9, abs_tol=1e-12):
        logger.debug(f"ρ variants differ: {rho} vs {rho_alt}")

    return AmbiguitySet(
        support=support,
        radius=epsilon + gamma * H,
        epsilon=epsilon,
        H=H,
        rho=rho,
        rho_alternate=rho_alt,
        gamma=gamma,
    )


def _resolve_constants(n: int, model: LearnedModel, cfg: LearningConfig) -> Tuple[float, float]:
    if model.c is not None and model.gamma is not None:
        return model.c, model.gamma
    if cfg.c_fallback is None:
        raise RankDeficientGramError("rank-deficient Gram: c undefined", sigma_min=model.sigma_min)
    logger.warning(f"⚠️ σ_min(A) = 0, using c_fallback = {cfg.c_fallback}")
    return cfg.c_fallback, n * cfg.c_fallback + cfg.theta
