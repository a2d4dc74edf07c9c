"""
Simulation Engine - Замкнутый цикл обучение → оптимизация → среда
=================================================================

На каждом шаге t = 1..horizon:
1. окно I_t → α, c, γ (learn_model)
2. множество неопределённости → ε̂, ρ (build_ambiguity)
3. G_μ(t, ·) сценария → шаг(и) ускоренного градиента → u_t
4. x̂_{t+1} = step(x̂_t, u_t, w_t) в истинной среде

Перед циклом x̂_1 = step(x̂_0, u_0, w_0) с u_0 = Π(u0).
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from app.core.constants import PROGRESS_EVERY
from app.core.errors import SimulationError, StepError
from app.core.logger import logger
from app.diagnostics.regret import RegretTracker, oracle_ustar, realized_regret
from app.learning.ambiguity import AmbiguitySet, LearnedModel, build_ambiguity, learn_model
from app.learning.window import LearningConfig, ObservationWindow, WindowPredictions
from app.objectives import ProblemData, loss_lipschitz, smoothing_params, time_lipschitz_sample
from app.scenarios import AllocationParams, AllocationScenario, OscillatorParams, OscillatorScenario, Scenario
from app.simulation.records import StepRow, TrajectoryRecord
from app.simulation.run_config import RunConfig
from app.solver.accelerated import SolverRecord, SolverState, run_online
from app.solver.projection import project


def build_scenario(config: RunConfig, rng: Optional[np.random.Generator] = None) -> Scenario:
    """Сценарий по имени из конфигурации"""
    if config.scenario == "oscillator":
        params = OscillatorParams() if config.sigma is None else OscillatorParams(sigma=config.sigma)
        return OscillatorScenario(params, control_weight=config.control_weight)

    overrides: Dict[str, Any] = {"switch_interval": config.switch_interval}
    if config.sigma is not None:
        overrides["sigma"] = config.sigma
    return AllocationScenario(AllocationParams(**overrides), horizon=config.horizon, rng=rng)


@dataclass
class SimulationResult:
    """Результат прогона (при ошибке траектория обрезана)"""
    config: RunConfig
    record: TrajectoryRecord
    summary: Dict[str, Any]
    error: Optional[SimulationError] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class _StepContext:
    window: ObservationWindow
    model: LearnedModel
    ambiguity: AmbiguitySet
    data: ProblemData


@dataclass
class _RegretState:
    tracker: RegretTracker
    u_star: Optional[np.ndarray] = None
    previous_data: Optional[ProblemData] = None
    dominated: List[bool] = field(default_factory=list)
    oracle_failures: int = 0


class SimulationEngine:
    """
    Движок замкнутого цикла

    Args:
        config: параметры прогона
        scenario: готовый сценарий (иначе строится по config)
    """

    def __init__(self, config: RunConfig, scenario: Optional[Scenario] = None):
        self.config = config
        noise_seq, schedule_seq, regret_seq = np.random.SeedSequence(config.seed).spawn(3)
        self.noise_rng = np.random.default_rng(noise_seq)
        self.scenario = scenario or build_scenario(config, np.random.default_rng(schedule_seq))
        self.regret_seed = int(regret_seq.generate_state(1)[0])

        self.basis = self.scenario.basis()
        self.mu = config.mu if config.mu is not None else self.scenario.default_mu
        self.learning: LearningConfig = config.learning(self.scenario.noise_scale)

        H = config.horizon
        self.states = np.zeros((H + 2, self.scenario.n))
        self.controls = np.zeros((H + 1, self.scenario.m))
        self.noises = np.zeros((H + 1, self.scenario.n))
        self.alphas = np.zeros((H, self.basis.p))
        self.record = TrajectoryRecord(n=self.scenario.n, m=self.scenario.m, p=self.basis.p, regret=config.regret)

        self._context: Optional[_StepContext] = None
        self._eps_hat: List[float] = []
        self._rho: List[float] = []
        self._rho_gap = 0.0
        self._regret: Optional[_RegretState] = None

    # === Шаги цикла ===

    def _assemble(self, t: int, state: SolverState) -> ProblemData:
        window = ObservationWindow.from_history(t, self.states[: t + 1], self.controls[:t], self.learning.T0)
        pred = WindowPredictions.evaluate(window, self.basis)
        model = learn_model(window, self.basis, self.learning, predictions=pred)
        ambiguity = build_ambiguity(window, self.basis, model.alpha, model, self.learning, state.u, predictions=pred)
        data = self.scenario.assemble(t, window, model.alpha, ambiguity, self.mu, pred)
        self._context = _StepContext(window=window, model=model, ambiguity=ambiguity, data=data)
        return data

    def _apply(self, t: int, state: SolverState, solver_record: SolverRecord) -> None:
        ctx = self._context
        u = state.u
        self.controls[t] = u
        self.noises[t] = self.scenario.noise(self.noise_rng)
        self.states[t + 1] = self.scenario.step(t, self.states[t], u, self.noises[t])
        self.alphas[t - 1] = ctx.model.alpha

        report = self._diagnose(t, state, solver_record) if self._regret is not None else None

        self.record.append(
            StepRow(
                t=t,
                x=self.states[t],
                u=u,
                alpha=ctx.model.alpha,
                gamma=ctx.ambiguity.gamma,
                eps_hat=ctx.ambiguity.radius,
                rho=ctx.ambiguity.rho,
                objective=solver_record.value,
                rho_alternate=ctx.ambiguity.rho_alternate,
                regret=report,
            )
        )
        self._eps_hat.append(ctx.ambiguity.radius)
        self._rho.append(ctx.ambiguity.rho)
        self._rho_gap = max(self._rho_gap, abs(ctx.ambiguity.rho - ctx.ambiguity.rho_alternate))

        if t % PROGRESS_EVERY == 0:
            logger.info(f"  Progress: {t}/{self.config.horizon}, ε̂ = {ctx.ambiguity.radius:.4g}")

    def _diagnose(self, t: int, state: SolverState, solver_record: SolverRecord):
        ctx = self._context
        rs = self._regret
        data = ctx.data

        oracle = oracle_ustar(data, self.scenario.feasible, u0=rs.u_star)
        if not oracle.converged:
            rs.oracle_failures += 1
        rs.u_star = oracle.u

        time_drift = 0.0
        if rs.previous_data is not None:
            time_drift = time_lipschitz_sample(data, rs.previous_data, self.controls[t - 1])
        rs.previous_data = data

        rs.tracker.observe(
            t,
            u=state.u,
            u_star=oracle.u,
            eps_prev=state.step_size,
            delta_prev=state.delta_prev,
            g_star=oracle.value,
            value=solver_record.value,
            time_drift=time_drift,
        )
        realized, se = realized_regret(
            state.u,
            oracle.u,
            self.scenario.truth_sampler(t, self.states[t]),
            self.scenario.loss(t),
            self.config.samples,
            seed=(self.regret_seed + t) % 2 ** 63,
        )
        report = rs.tracker.report(
            t,
            a_mu=smoothing_params(data).gap,
            l_ustar=loss_lipschitz(data, oracle.u),
            eps_hat=ctx.ambiguity.radius,
            rho=ctx.ambiguity.rho,
            realized=realized,
            realized_se=se,
        )
        if report is not None:
            rs.dominated.append(report.realized <= report.bound)
        return report

    # === Прогон ===

    def run(self) -> SimulationResult:
        cfg = self.config
        logger.info(f"🚀 Simulation start: {self.scenario.name}, horizon={cfg.horizon}, seed={cfg.seed}")

        feasible = self.scenario.feasible
        u0 = project(feasible, self.scenario.initial_decision())
        self.states[0] = self.scenario.initial_state()
        self.controls[0] = u0
        self.noises[0] = self.scenario.noise(self.noise_rng)
        self.states[1] = self.scenario.step(0, self.states[0], u0, self.noises[0])
        if cfg.regret:
            self._regret = _RegretState(tracker=RegretTracker(self.learning.T0, u0))

        error: Optional[SimulationError] = None
        try:
            run_online(
                self._assemble,
                feasible,
                cfg.horizon,
                u0,
                step_rule=cfg.step_rule,
                inner_steps=cfg.inner_steps,
                lipschitz_variant=cfg.lipschitz,
                on_decision=self._apply,
            )
        except StepError as e:
            error = e
            self.record.truncated = True
            logger.error(f"❌ Simulation stopped at step {e.step}: {e.cause}")

        summary = self.summary(error)
        logger.info(f"✅ Simulation finished: {len(self.record)} rows")
        return SimulationResult(config=cfg, record=self.record, summary=summary, error=error)

    def summary(self, error: Optional[SimulationError] = None) -> Dict[str, Any]:
        """Сводка: финальное α, средние ε̂ и ρ, метрики сценария"""
        done = len(self.record)
        t_last = max(done, 1)
        summary: Dict[str, Any] = {
            "scenario": self.scenario.name,
            "seed": self.config.seed,
            "horizon": self.config.horizon,
            "steps": done,
            "truncated": error is not None,
            "mu": self.mu,
            "final_alpha": self.alphas[done - 1].tolist() if done else [],
            "true_alpha": self.scenario.true_alpha(t_last).tolist(),
            "mean_eps_hat": float(np.mean(self._eps_hat)) if done else float("nan"),
            "mean_rho": float(np.mean(self._rho)) if done else float("nan"),
            "max_rho_discrepancy": self._rho_gap,
        }
        if done:
            history = {
                "states": self.states[: done + 2],
                "controls": self.controls[: done + 1],
                "noises": self.noises[: done + 1],
                "alpha": self.alphas[:done],
            }
            summary.update(self.scenario.metrics(history, warm_up=self.learning.T0))
        if self._regret is not None:
            dominated = self._regret.dominated
            summary["regret"] = {
                "steps": len(dominated),
                "fraction_within_bound": float(np.mean(dominated)) if dominated else float("nan"),
                "oracle_failures": self._regret.oracle_failures,
            }
        if error is not None:
            summary["error"] = error.to_dict()
        return summary


def run_simulation(config: RunConfig) -> SimulationResult:
    return SimulationEngine(config).run()
