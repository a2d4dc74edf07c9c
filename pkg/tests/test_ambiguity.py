"""
Тесты обучения множества неопределённости
"""

import math

import numpy as np
import pytest

from app.core.errors import DegenerateAlphaSumError, DimensionMismatchError, InvalidInputError, RankDeficientGramError
from app.learning.ambiguity import (
    build_ambiguity,
    build_gram,
    concentration_radius,
    confidence,
    confidence_alternate,
    drift_term,
    estimate_alpha,
    learn_model,
    prediction_points,
)
from app.learning.window import LearningConfig, ObservationWindow, PredictorBasis, WindowPredictions
from app.scenarios.oscillator import OscillatorScenario, oscillator_basis, oscillator_step

from tests.conftest import constant_basis


def _scalar_window(states, controls=None):
    states = np.asarray(states, dtype=float).reshape(-1, 1)
    T = states.shape[0] - 1
    controls = np.zeros((T, 1)) if controls is None else np.asarray(controls, dtype=float).reshape(-1, 1)
    return ObservationWindow(t=T, states=states, controls=controls)


class TestGram:
    def test_single_point_with_regularization(self):
        window = _scalar_window([0.0, 6.0])
        gram = build_gram(window, constant_basis([2.0]), d=1.0)
        np.testing.assert_allclose(gram.A, [[2.0]])
        np.testing.assert_allclose(gram.b, [6.0])
        assert estimate_alpha(gram.A, gram.b).alpha == pytest.approx([3.0])

    def test_regularized_predictions_bounded_by_d(self, noiseless_oscillator_window):
        window = noiseless_oscillator_window(T=50)
        basis = oscillator_basis()
        pred = WindowPredictions.evaluate(window, basis)
        d = 0.5
        gram = build_gram(window, basis, d, predictions=pred)
        scaled = np.linalg.norm(pred.f_k, axis=2) * gram.regularizers[None, :]
        assert np.all(scaled <= d + 1e-12)

    def test_gram_symmetric(self, noiseless_oscillator_window):
        gram = build_gram(noiseless_oscillator_window(T=40), oscillator_basis(), d=1.0)
        np.testing.assert_array_equal(gram.A, gram.A.T)

    def test_non_finite_predictor_reports_index(self):
        window = _scalar_window([0.0, 1.0, 2.0])
        bad = PredictorBasis(
            f1=[lambda t, x: np.where(t[:, None] == 1, np.nan, x)],
            f2=[lambda t, x: np.zeros((x.shape[0], 1, 1))],
            n=1,
            m=1,
        )
        with pytest.raises(InvalidInputError) as excinfo:
            WindowPredictions.evaluate(window, bad)
        assert excinfo.value.context == {"i": 0, "k": 1}


class TestAlpha:
    def test_identity_gram(self):
        est = estimate_alpha(np.eye(2), np.array([0.3, 0.7]))
        np.testing.assert_allclose(est.alpha, [0.3, 0.7])
        assert est.rank == 2
        assert est.sigma_min == pytest.approx(1.0)

    def test_pseudo_inverse_drops_null_direction(self):
        A = np.array([[1.0, 1.0], [1.0, 1.0]])
        est = estimate_alpha(A, np.array([2.0, 2.0]))
        np.testing.assert_allclose(est.alpha, [1.0, 1.0])
        assert est.rank == 1

    def test_zero_gram_is_degenerate(self):
        est = estimate_alpha(np.zeros((2, 2)), np.zeros(2))
        assert est.degenerate
        assert est.sigma_min == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            estimate_alpha(np.eye(2), np.ones(3))

    def test_exact_recovery_on_noiseless_oscillator(self, noiseless_oscillator_window):
        window = noiseless_oscillator_window(T=500)
        model = learn_model(window, oscillator_basis(), LearningConfig())
        np.testing.assert_allclose(model.alpha, OscillatorScenario().true_alpha(), atol=1e-6)
        assert model.c is not None and model.gamma == pytest.approx(2 * model.c + LearningConfig().theta)


class TestCalibratedConstant:
    def test_scalar_mean_standard_error(self):
        # f ≡ 2, P = ½: α̂ = mean/2, se = s/(2√T)
        window = _scalar_window([0.0, 1.0, 3.0, 2.0, 4.0])
        cfg = LearningConfig(bound="calibrated", beta=0.05)
        model = learn_model(window, constant_basis([2.0]), cfg)
        se = math.sqrt(5.0 / 3.0) / (2.0 * math.sqrt(4.0))
        assert model.alpha == pytest.approx([1.25])
        assert model.c == pytest.approx(math.sqrt(2.0 * math.log(40.0)) * se)
        assert model.gamma == pytest.approx(model.c + cfg.theta)

    def test_falls_back_to_configured_sigma_without_dof(self):
        window = _scalar_window([0.0, 6.0])
        cfg = LearningConfig(bound="calibrated", sigma=0.3)
        model = learn_model(window, constant_basis([2.0]), cfg)
        assert model.c == pytest.approx(math.sqrt(2.0 * math.log(40.0)) * 0.3 / 2.0)

    def test_noiseless_window_gives_near_zero_constant(self, noiseless_oscillator_window):
        window = noiseless_oscillator_window(T=200)
        model = learn_model(window, oscillator_basis(), LearningConfig(bound="calibrated", sigma=1e-3))
        assert model.c < 1e-6

    def test_covers_true_weights_and_tighter_than_formula(self, osc_params):
        basis = oscillator_basis(osc_params)
        alpha_true = OscillatorScenario(osc_params).true_alpha()
        h = osc_params.h
        covered = 0
        for seed in range(40):
            gen = np.random.default_rng(seed)
            T = 300
            controls = gen.uniform(-osc_params.u_bound, osc_params.u_bound, size=(T, 2))
            states = np.zeros((T + 1, 2))
            states[0] = osc_params.x0
            for k in range(T):
                w = gen.normal(scale=osc_params.sigma, size=2)
                states[k + 1] = oscillator_step(states[k], controls[k], w, osc_params)
            window = ObservationWindow(t=T, states=states, controls=controls)

            calibrated = learn_model(window, basis, LearningConfig(bound="calibrated", sigma=h * osc_params.sigma))
            certified = learn_model(window, basis, LearningConfig(bound="certified", sigma=h * osc_params.sigma))
            assert calibrated.c < certified.c
            covered += bool(np.max(np.abs(calibrated.alpha - alpha_true)) <= calibrated.c)
        assert covered >= 34


class TestRadiusAndConfidence:
    def test_concentration_radius_value(self):
        cfg = LearningConfig(beta=0.05, sigma=1.0, a0=1.0)
        expected = math.sqrt(4.0 / 500 * math.log(20.0)) + 500 ** -0.5
        assert concentration_radius(2, 500, cfg) == pytest.approx(expected)
        assert concentration_radius(2, 500, cfg) == pytest.approx(0.1548 + 0.0447, abs=1e-4)

    def test_radius_decreases_with_window(self):
        cfg = LearningConfig()
        radii = [concentration_radius(2, T, cfg) for T in range(1, 200)]
        assert all(a > b for a, b in zip(radii, radii[1:]))

    def test_zero_slack_gives_zero_confidence(self):
        assert confidence(0.0, 100, 2, 1.0, 2.0, 0.05) == 0.0

    def test_confidence_monotone_in_slack(self):
        n, c, T, beta = 2, 3.0, 100, 0.05
        rhos = [confidence(theta, T, n, c, n * c + theta, beta) for theta in np.linspace(0.0, 200.0, 50)]
        assert all(a <= b + 1e-15 for a, b in zip(rhos, rhos[1:]))
        assert confidence(1e6, T, n, c, n * c + 1e6, beta) == pytest.approx(1.0 - beta, rel=1e-6)

    def test_alternate_matches_when_gamma_consistent(self):
        n, c, theta = 2, 0.7, 1.3
        gamma = n * c + theta
        assert confidence(theta, 50, n, c, gamma, 0.1) == pytest.approx(
            confidence_alternate(50, n, c, gamma, 0.1)
        )


class TestFormulaGrids:
    """Монотонности формул на 100 случайных наборах параметров"""

    @pytest.fixture
    def grid(self):
        gen = np.random.default_rng(100)
        return [
            {
                "n": int(gen.integers(1, 6)),
                "beta": float(gen.uniform(0.01, 0.5)),
                "sigma": float(gen.uniform(1e-4, 2.0)),
                "a0": float(gen.uniform(0.1, 3.0)),
                "c": float(gen.uniform(1e-3, 10.0)),
                "T": int(gen.integers(1, 1000)),
            }
            for _ in range(100)
        ]

    def test_radius_strictly_decreasing_in_window(self, grid):
        for g in grid:
            cfg = LearningConfig(beta=g["beta"], sigma=g["sigma"], a0=g["a0"])
            radii = [concentration_radius(g["n"], T, cfg) for T in (g["T"], g["T"] + 1, 2 * g["T"] + 5)]
            assert radii[0] > radii[1] > radii[2]

    def test_confidence_nondecreasing_in_slack(self, grid):
        for g in grid:
            n, c, T, beta = g["n"], g["c"], g["T"], g["beta"]
            thetas = np.concatenate([[0.0], np.geomspace(1e-3, 1e9, 30)])
            rhos = [confidence(th, T, n, c, n * c + th, beta) for th in thetas]
            assert all(a <= b for a, b in zip(rhos, rhos[1:]))
            assert rhos[-1] == pytest.approx(1.0 - beta, rel=1e-9)
            assert all(0.0 <= r <= 1.0 - beta for r in rhos)

    def test_radius_equals_epsilon_without_drift(self, grid):
        for g in grid:
            n, T = g["n"], min(g["T"], 50)
            cfg = LearningConfig(beta=g["beta"], sigma=g["sigma"], a0=g["a0"], c_fallback=g["c"])
            window = ObservationWindow(t=T, states=np.ones((T + 1, n)), controls=np.zeros((T, 1)))
            basis = constant_basis([1.0, 2.0], n=n)
            model = learn_model(window, basis, cfg)
            ambiguity = build_ambiguity(window, basis, np.array([0.5, 0.5]), model, cfg, np.zeros(1))
            assert ambiguity.H == 0.0
            assert ambiguity.radius == ambiguity.epsilon == concentration_radius(n, T, cfg)


class TestPredictionPoints:
    def test_zero_predictor_points_are_observed_states(self, rng):
        states = rng.normal(size=(6, 1))
        window = _scalar_window(states)
        points = prediction_points(window, constant_basis([0.0]), np.array([1.0]), np.zeros(1))
        np.testing.assert_allclose(points, states[1:])

    def test_time_invariant_predictors_return_next_states(self, rng):
        states = rng.normal(size=(8, 2))
        controls = np.tile(rng.normal(size=1), (7, 1))
        window = ObservationWindow(t=7, states=states, controls=controls)
        basis = constant_basis([0.3, -0.7], n=2)
        for alpha in (np.array([0.25, 0.75]), np.array([2.0, -0.5])):
            points = prediction_points(window, basis, alpha, controls[0])
            np.testing.assert_allclose(points, states[1:], atol=1e-12)

    def test_true_weights_give_one_step_prediction(self, noiseless_oscillator_window, osc_params):
        window = noiseless_oscillator_window(T=30)
        alpha = OscillatorScenario(osc_params).true_alpha()
        u = np.array([0.2, -0.1])
        points = prediction_points(window, oscillator_basis(osc_params), alpha, u)
        expected = oscillator_step(window.current_state, u, np.zeros(2), osc_params)
        np.testing.assert_allclose(points, np.tile(expected, (30, 1)), atol=1e-12)

    def test_degenerate_alpha_sum(self):
        window = _scalar_window([0.0, 1.0])
        with pytest.raises(DegenerateAlphaSumError):
            prediction_points(window, constant_basis([1.0, 2.0]), np.array([1.0, -1.0]), np.zeros(1))


class TestDriftTerm:
    def test_shift_invariance(self, rng):
        f_k = rng.normal(size=(2, 5, 3))
        pred = WindowPredictions(
            f_k=f_k,
            next_states=rng.normal(size=(5, 3)),
            drift_t=rng.normal(size=(2, 3)),
            slope_t=rng.normal(size=(2, 3, 1)),
        )
        shift = rng.normal(size=3)
        shifted = WindowPredictions(
            f_k=f_k + shift,
            next_states=pred.next_states,
            drift_t=pred.drift_t + shift,
            slope_t=pred.slope_t,
        )
        u = np.array([0.4])
        assert drift_term(shifted, u) == pytest.approx(drift_term(pred, u))

    def test_stationary_window_has_zero_drift(self):
        T = 20
        window = ObservationWindow(t=T, states=np.zeros((T + 1, 2)), controls=np.zeros((T, 2)))
        cfg = LearningConfig(c_fallback=1.0)
        basis = oscillator_basis()
        model = learn_model(window, basis, cfg)
        ambiguity = build_ambiguity(window, basis, np.array([0.5, 0.5]), model, cfg, np.zeros(2))
        assert ambiguity.H == 0.0
        assert ambiguity.radius == ambiguity.epsilon


class TestBuildAmbiguity:
    def test_rank_deficient_without_fallback(self):
        window = _scalar_window([0.0, 1.0, 2.0])
        basis = constant_basis([0.0])
        cfg = LearningConfig()
        model = learn_model(window, basis, cfg)
        assert model.c is None
        with pytest.raises(RankDeficientGramError):
            build_ambiguity(window, basis, np.array([1.0]), model, cfg, np.zeros(1))

    def test_rank_deficient_with_fallback(self):
        window = _scalar_window([0.0, 1.0, 2.0])
        basis = constant_basis([0.0])
        cfg = LearningConfig(c_fallback=2.0, theta=0.5)
        model = learn_model(window, basis, cfg)
        ambiguity = build_ambiguity(window, basis, np.array([1.0]), model, cfg, np.zeros(1))
        assert ambiguity.gamma == pytest.approx(2.5)
        assert ambiguity.support.shape == (2, 1)
        np.testing.assert_allclose(ambiguity.weights, [0.5, 0.5])

    def test_oscillator_window(self, noiseless_oscillator_window):
        window = noiseless_oscillator_window(T=100)
        basis = oscillator_basis()
        cfg = LearningConfig()
        model = learn_model(window, basis, cfg)
        ambiguity = build_ambiguity(window, basis, model.alpha, model, cfg, np.array([0.1, -0.2]))
        assert ambiguity.support.shape == (100, 2)
        assert ambiguity.radius >= ambiguity.epsilon
        assert 0.0 <= ambiguity.rho <= 1.0 - cfg.beta


class TestWindow:
    def test_from_history_uses_tail(self):
        states = np.arange(11, dtype=float).reshape(-1, 1)
        controls = np.arange(10, dtype=float).reshape(-1, 1)
        window = ObservationWindow.from_history(10, states, controls, T0=4)
        assert window.T == 4
        np.testing.assert_array_equal(window.states[:, 0], [6, 7, 8, 9, 10])
        np.testing.assert_array_equal(window.times, [6, 7, 8, 9])

    def test_from_history_short(self):
        states = np.zeros((3, 1))
        window = ObservationWindow.from_history(2, states, np.zeros((2, 1)), T0=500)
        assert window.T == 2

    def test_mismatched_lengths(self):
        with pytest.raises(DimensionMismatchError):
            ObservationWindow(t=3, states=np.zeros((3, 1)), controls=np.zeros((3, 1)))

    @pytest.mark.parametrize("field, value", [("beta", 1.5), ("beta", 0.0), ("theta", -1.0), ("sigma", 0.0)])
    def test_invalid_learning_config(self, field, value):
        with pytest.raises(ValueError):
            LearningConfig(**{field: value})
