"""
Общие фикстуры тестов
"""

import numpy as np
import pytest

from app.learning.window import ObservationWindow, PredictorBasis
from app.scenarios.oscillator import OscillatorParams, oscillator_step


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def osc_params():
    return OscillatorParams()


@pytest.fixture
def noiseless_oscillator_window(osc_params):
    """Фабрика окон осциллятора без шума: x_{k+1} = A(x_k)x_k + h·u_k"""

    def make(T: int = 500, seed: int = 0) -> ObservationWindow:
        gen = np.random.default_rng(seed)
        controls = gen.uniform(-osc_params.u_bound, osc_params.u_bound, size=(T, 2))
        states = np.zeros((T + 1, 2))
        states[0] = osc_params.x0
        for k in range(T):
            states[k + 1] = oscillator_step(states[k], controls[k], np.zeros(2), osc_params)
        return ObservationWindow(t=T, states=states, controls=controls)

    return make


def constant_basis(values, n: int = 1, m: int = 1) -> PredictorBasis:
    """Базис из не зависящих от (t, x, u) предикторов с заданными значениями"""
    drifts = []
    for v in values:
        vec = np.broadcast_to(np.asarray(v, dtype=float), (n,))
        drifts.append(lambda t, x, vec=vec: np.tile(vec, (x.shape[0], 1)))
    slopes = [lambda t, x: np.zeros((x.shape[0], n, m)) for _ in values]
    return PredictorBasis(f1=drifts, f2=slopes, n=n, m=m)


class Quadratic:
    """½(u − c)ᵀ diag(q) (u − c) в интерфейсе value_grad / lipschitz"""

    def __init__(self, center, weights=None):
        self.center = np.asarray(center, dtype=float)
        self.weights = np.ones_like(self.center) if weights is None else np.asarray(weights, dtype=float)

    def value_grad(self, u):
        from app.smoothing.envelopes import ValueGrad

        diff = np.asarray(u, dtype=float) - self.center
        return ValueGrad(value=0.5 * float(diff @ (self.weights * diff)), grad=self.weights * diff)

    def lipschitz(self, variant: str = "certified") -> float:
        return float(self.weights.max())
