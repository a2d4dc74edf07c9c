"""
Тесты целевых функций G_μ
"""

import numpy as np
import pytest

from app.core.errors import DimensionMismatchError, InvalidInputError, PreconditionError
from app.learning.ambiguity import AmbiguitySet, build_ambiguity, learn_model
from app.learning.window import LearningConfig, ObservationWindow
from app.objectives import (
    Problem1Data,
    Problem2Data,
    assemble_problem1,
    assemble_problem2,
    floored,
    lipschitz_grad_constant,
    smoothing_params,
)
from app.scenarios.allocation import AllocationParams, DriftSchedule, allocation_basis, allocation_step
from app.scenarios.oscillator import oscillator_basis


def _ambiguity(T: int, n: int, epsilon: float = 0.2, gamma: float = 3.0) -> AmbiguitySet:
    return AmbiguitySet(
        support=np.zeros((T, n)),
        radius=epsilon,
        epsilon=epsilon,
        H=0.0,
        rho=0.5,
        rho_alternate=0.5,
        gamma=gamma,
    )


def random_problem1(rng, n=2, m=2, p=2, T=6, mu=None) -> Problem1Data:
    M = rng.normal(size=(n, m))
    H_lin = rng.normal(size=(p, n, m))
    return Problem1Data(
        M=M,
        p_const=rng.normal(size=(T, n)),
        H_const=rng.normal(size=(p, T, n)),
        H_lin=H_lin,
        epsilon=float(rng.uniform(0.0, 1.0)),
        gamma=float(rng.uniform(0.0, 3.0)),
        mu=float(rng.uniform(0.05, 1.0)) if mu is None else mu,
        s0=float(np.linalg.norm(M, 2) ** 2),
        s=np.array([np.linalg.norm(h, 2) ** 2 for h in H_lin]),
        control_weight=float(rng.uniform(0.5, 2.0)),
    )


def random_problem2(rng, n=3, T=8) -> Problem2Data:
    return Problem2Data(
        points=rng.uniform(0.0, 2.0, size=(T, n)),
        q=float(rng.uniform(0.0, 0.5)),
        r0=float(rng.uniform(0.5, 2.0)),
        mu=float(rng.uniform(0.05, 0.5)),
    )


def zero_problem1(n=2, m=2, p=1, T=3, epsilon=0.0, mu=0.1) -> Problem1Data:
    return Problem1Data(
        M=np.zeros((n, m)),
        p_const=np.zeros((T, n)),
        H_const=np.zeros((p, T, n)),
        H_lin=np.zeros((p, n, m)),
        epsilon=epsilon,
        gamma=0.0,
        mu=mu,
        s0=0.0,
        s=np.zeros(p),
    )


def finite_difference(data, u, h=1e-6):
    return np.array(
        [(data.value_grad(u + h * e).value - data.value_grad(u - h * e).value) / (2 * h) for e in np.eye(u.size)]
    )


class TestProblem1:
    def test_zero_data_reduces_to_control_cost(self):
        data = zero_problem1()
        u = np.array([0.3, -0.4])
        vg = data.value_grad(u)
        assert vg.value == pytest.approx(0.125)
        np.testing.assert_allclose(vg.grad, u)

    def test_radius_enters_as_constant(self):
        vg = zero_problem1(epsilon=0.3).value_grad(np.zeros(2))
        assert vg.value == pytest.approx(0.3)
        np.testing.assert_array_equal(vg.grad, np.zeros(2))

    def test_gradient_matches_finite_differences(self, rng):
        for _ in range(50):
            data = random_problem1(rng)
            u = rng.uniform(-1.0, 1.0, size=data.m)
            np.testing.assert_allclose(data.value_grad(u).grad, finite_difference(data, u), rtol=1e-5, atol=1e-6)

    def test_sandwich(self, rng):
        for _ in range(50):
            data = random_problem1(rng)
            u = rng.normal(size=data.m)
            smooth, exact = data.value_grad(u).value, data.exact(u)
            assert smooth <= exact + 1e-12
            assert exact <= smooth + data.smoothing.gap + 1e-12

    def test_gradient_lipschitz_bound(self, rng):
        for _ in range(30):
            data = random_problem1(rng)
            L = lipschitz_grad_constant(data, "certified")
            for _ in range(10):
                u, v = rng.normal(size=(2, data.m))
                diff = np.linalg.norm(data.value_grad(u).grad - data.value_grad(v).grad)
                assert diff <= L * np.linalg.norm(u - v) * (1 + 1e-9)

    def test_convexity(self, rng):
        data = random_problem1(rng)
        for _ in range(100):
            u, v = rng.normal(size=(2, data.m))
            lam = rng.uniform()
            mid = data.value_grad(lam * u + (1 - lam) * v).value
            assert mid <= lam * data.value_grad(u).value + (1 - lam) * data.value_grad(v).value + 1e-12

    def test_strong_convexity_from_control_cost(self, rng):
        # смещение сглаживания не трогает (λ/2)‖u‖²: модуль λ сохраняется
        for _ in range(20):
            data = random_problem1(rng)
            for _ in range(10):
                u, v = rng.normal(size=(2, data.m))
                gap = (data.value_grad(u).grad - data.value_grad(v).grad) @ (u - v)
                assert gap >= data.control_weight * float((u - v) @ (u - v)) * (1 - 1e-9)

    def test_nominal_variant(self, rng):
        data = random_problem1(rng)
        expected = data.control_weight + (data.s0 + data.gamma * np.sqrt(data.s).sum()) / data.mu
        assert data.lipschitz("nominal") == pytest.approx(expected)
        with pytest.raises(InvalidInputError):
            lipschitz_grad_constant(data, "tight")

    def test_wrong_control_dimension(self):
        with pytest.raises(DimensionMismatchError):
            zero_problem1().value_grad(np.zeros(3))


class TestAssembleProblem1:
    def test_oscillator_control_matrix(self, noiseless_oscillator_window, osc_params):
        window = noiseless_oscillator_window(T=30)
        alpha = np.array([0.4, 0.9])
        data = assemble_problem1(window, oscillator_basis(), alpha, _ambiguity(30, 2), mu=0.1)
        np.testing.assert_allclose(data.M, alpha.sum() * osc_params.h * np.eye(2))
        assert data.s0 == pytest.approx((alpha.sum() * osc_params.h) ** 2)
        np.testing.assert_allclose(data.s, [osc_params.h ** 2] * 2)

    def test_stationary_window_has_zero_drift_terms(self):
        T = 10
        window = ObservationWindow(t=T, states=np.zeros((T + 1, 2)), controls=np.zeros((T, 2)))
        data = assemble_problem1(window, oscillator_basis(), np.array([0.2, 0.8]), _ambiguity(T, 2), mu=0.1)
        np.testing.assert_array_equal(data.H_const, np.zeros_like(data.H_const))
        H = data.H_const - (data.H_lin @ np.zeros(2))[:, None, :]
        assert np.linalg.norm(H) == 0.0

    def test_reference_shifts_points(self, noiseless_oscillator_window):
        window = noiseless_oscillator_window(T=10)
        basis = oscillator_basis()
        base = assemble_problem1(window, basis, np.array([0.5, 0.5]), _ambiguity(10, 2), mu=0.1)
        ref = np.array([0.3, -0.1])
        shifted = assemble_problem1(window, basis, np.array([0.5, 0.5]), _ambiguity(10, 2), mu=0.1, reference=ref)
        np.testing.assert_allclose(shifted.p_const, base.p_const - ref)

    def test_alpha_shape(self, noiseless_oscillator_window):
        with pytest.raises(DimensionMismatchError):
            assemble_problem1(noiseless_oscillator_window(T=5), oscillator_basis(), np.ones(3), _ambiguity(5, 2), 0.1)


class TestProblem2:
    def test_zero_decision(self, rng):
        mu = 0.3
        data = Problem2Data(points=rng.uniform(size=(5, 3)), q=0.4, r0=1.0, mu=mu)
        assert data.value_grad(np.zeros(3)).value == pytest.approx(1.0 - mu / 2)

    def test_norm_term_only(self):
        data = Problem2Data(points=np.zeros((4, 2)), q=1.0, r0=1.0, mu=1.0)
        u = np.array([1.2, 1.6])
        vg = data.value_grad(u)
        assert vg.value == pytest.approx(2.0)
        np.testing.assert_allclose(vg.grad, u / 2.0)

    def test_gradient_matches_finite_differences(self, rng):
        for _ in range(50):
            data = random_problem2(rng)
            u = rng.uniform(0.0, 1.0, size=3)
            np.testing.assert_allclose(data.value_grad(u).grad, finite_difference(data, u), rtol=1e-5, atol=1e-6)

    def test_sandwich(self, rng):
        for _ in range(50):
            data = random_problem2(rng)
            u = rng.dirichlet(np.ones(3))
            smooth, exact = data.value_grad(u).value, data.exact(u)
            assert smooth <= exact + 1e-12
            assert exact <= smooth + smoothing_params(data).gap + 1e-12

    def test_gradient_lipschitz_bound(self, rng):
        for _ in range(30):
            data = random_problem2(rng)
            L = data.lipschitz("certified")
            for _ in range(10):
                u, v = rng.normal(size=(2, 3))
                diff = np.linalg.norm(data.value_grad(u).grad - data.value_grad(v).grad)
                assert diff <= L * np.linalg.norm(u - v) * (1 + 1e-9)

    def test_degenerate_constant_is_floored(self):
        data = Problem2Data(points=np.zeros((3, 2)), q=0.0, r0=1.0, mu=0.1)
        assert data.lipschitz() == 0.0
        assert floored(lipschitz_grad_constant(data)) == pytest.approx(1e-6)


class TestAssembleProblem2:
    def test_stationary_window_gives_radius(self):
        T = 8
        window = ObservationWindow(t=T, states=np.tile([1.0, 1.2, 1.0], (T + 1, 1)), controls=np.zeros((T, 3)))
        data = assemble_problem2(
            window, allocation_basis(), np.array([1.0, 0.0, 0.0]), _ambiguity(T, 3, epsilon=0.25), r0=1.3, mu=0.01
        )
        assert data.q == pytest.approx(0.25)
        np.testing.assert_allclose(data.points, window.states[1:])

    def test_control_dependent_basis_rejected(self, noiseless_oscillator_window):
        window = noiseless_oscillator_window(T=5)
        with pytest.raises(PreconditionError):
            assemble_problem2(window, oscillator_basis(), np.array([0.5, 0.5]), _ambiguity(5, 2), r0=1.0, mu=0.1)

    def test_nonpositive_target(self):
        window = ObservationWindow(t=2, states=np.ones((3, 3)), controls=np.zeros((2, 3)))
        with pytest.raises(PreconditionError):
            assemble_problem2(window, allocation_basis(), np.ones(3) / 3, _ambiguity(2, 3), r0=0.0, mu=0.1)


class TestWorstCaseBound:
    """G(t, u) мажорирует E_Q ℓ для любого Q в шаре радиуса ε̂ вокруг эмпирического распределения"""

    @staticmethod
    def _perturbations(rng, T, n, radius):
        # сдвиги опорных точек со средней длиной radius: W1(P̂, Q) ≤ radius
        delta = rng.normal(size=(T, n))
        return delta * radius / np.linalg.norm(delta, axis=1).mean()

    def test_tracking_bound(self, noiseless_oscillator_window, rng):
        window = noiseless_oscillator_window(T=40)
        basis = oscillator_basis()
        cfg = LearningConfig(bound="calibrated", sigma=1e-3)
        model = learn_model(window, basis, cfg)
        u = np.array([0.2, -0.3])
        ambiguity = build_ambiguity(window, basis, model.alpha, model, cfg, u)
        reference = np.array([0.9, 0.1])
        data = assemble_problem1(window, basis, model.alpha, ambiguity, mu=0.1, reference=reference, control_weight=0.5)

        cost = 0.25 * float(u @ u)
        offsets = ambiguity.support - reference
        empirical = cost + float(np.linalg.norm(offsets, axis=1).mean())
        assert data.exact(u) == pytest.approx(empirical + ambiguity.radius, rel=1e-9)

        for _ in range(100):
            delta = self._perturbations(rng, window.T, 2, ambiguity.radius)
            shifted = cost + float(np.linalg.norm(offsets + delta, axis=1).mean())
            assert shifted <= data.exact(u) + 1e-12
            assert shifted <= data.value_grad(u).value + data.smoothing.gap + 1e-12

        # сдвиг наружу от опорного сигнала достигает границы
        outward = offsets / np.linalg.norm(offsets, axis=1, keepdims=True) * ambiguity.radius
        worst = cost + float(np.linalg.norm(offsets + outward, axis=1).mean())
        assert worst == pytest.approx(data.exact(u), rel=1e-9)

    def test_allocation_bound(self, rng):
        params = AllocationParams()
        schedule = DriftSchedule.constant(np.array([0.3, -0.2, 0.0]), levels=(1.5, 1.1))
        T = 40
        states = np.zeros((T + 1, 3))
        states[0] = [1.5, 1.1, 1.0]
        for k in range(T):
            w = np.array([*rng.normal(scale=params.sigma, size=2), 0.0])
            states[k + 1] = allocation_step(states[k], w, k, params, schedule)
        window = ObservationWindow(t=T, states=states, controls=np.full((T, 3), 1.0 / 3))
        basis = allocation_basis(params)
        cfg = LearningConfig(bound="calibrated", sigma=params.h * params.sigma)
        model = learn_model(window, basis, cfg)
        u = np.array([0.5, 0.3, 0.2])
        ambiguity = build_ambiguity(window, basis, model.alpha, model, cfg, u)
        r0 = 2.0
        data = assemble_problem2(window, basis, model.alpha, ambiguity, r0=r0, mu=0.01)

        assert data.q == pytest.approx(ambiguity.radius, rel=1e-12)
        np.testing.assert_allclose(data.points, ambiguity.support, atol=1e-12)

        def expected_shortfall(points):
            return float(np.maximum(0.0, 1.0 - points @ u / r0).mean())

        for _ in range(100):
            delta = self._perturbations(rng, T, 3, ambiguity.radius)
            assert expected_shortfall(data.points + delta) <= data.exact(u) + 1e-12

        # все точки сдвинуты против u: hinge активен, граница достигается
        against = -ambiguity.radius * u / np.linalg.norm(u)
        assert expected_shortfall(data.points + against) == pytest.approx(data.exact(u), rel=1e-9)

    def test_singleton_window_grid(self):
        # T = 1: точечная масса в любой точке шара радиуса ε̂ не превосходит G
        data = Problem2Data(points=np.array([[1.2, 0.9, 1.0]]), q=0.15, r0=1.3, mu=0.01)
        u = np.array([0.6, 0.1, 0.3])
        bound = data.exact(u)
        grid = np.linspace(-1.0, 1.0, 21)
        for dx in grid:
            for dy in grid:
                for dz in grid:
                    shift = np.array([dx, dy, dz]) * data.q
                    if np.linalg.norm(shift) > data.q:
                        continue
                    point = data.points[0] + shift
                    assert max(0.0, 1.0 - point @ u / data.r0) <= bound + 1e-12
