"""
Scenario Runner
Runs one scenario end to end: equilibria, simulation, metrics, KKT check and
result files.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from backend.frequency_control.analysis.diagnostics import hamiltonian, hamiltonian_supported, marginal_cost_spread, sync_frequency
from backend.frequency_control.analysis.metrics import FrequencyMetrics, control_effort, frequency_metrics, spread_series
from backend.frequency_control.analysis.trajectory import TrajectoryRecord, TrajectoryRecorder
from backend.frequency_control.controllers.reduction import reduction_check
from backend.frequency_control.controllers.specs import DAISpec, DecentralizedIntegralSpec, GatherBroadcastSpec
from backend.frequency_control.costs.lure import dispatch_cost, unit_profit
from backend.frequency_control.costs.model import CostModel
from backend.frequency_control.dispatch.kkt import KKTReport, verify_kkt
from backend.frequency_control.dispatch.market import DispatchSolution, solve_market_clearing
from backend.frequency_control.dispatch.problem import DispatchProblem, check_feasibility, require_feasible
from backend.frequency_control.dynamics.equilibrium import Equilibrium, allocation_cost, controller_equilibrium, find_equilibrium
from backend.frequency_control.dynamics.integrator import injections_after, simulate
from backend.frequency_control.dynamics.state import SystemState
from backend.frequency_control.harness.persistence import write_summary, write_trajectory_csv
from backend.frequency_control.harness.scenarios import Scenario
from backend.shared.utils.errors import CostDomainError, EquilibriumNotFoundError

logger = logging.getLogger(__name__)

KKT_TOL = 1e-5


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    scenario_id: str
    variant: str
    trajectory: TrajectoryRecord
    metrics: FrequencyMetrics
    summary: dict[str, Any]
    kkt: Optional[KKTReport] = None
    optimum: Optional[DispatchSolution] = None
    equilibrium: Optional[Equilibrium] = None
    outputs: dict[str, Path] = field(default_factory=dict)


def _initial_state(scenario: Scenario) -> tuple[SystemState, Equilibrium]:
    net = scenario.network
    eq, ctrl = controller_equilibrium(net, scenario.controller)
    theta = eq.theta.copy()
    omega = np.zeros(net.n_buses)
    ctrl = ctrl.copy()
    perturbation = scenario.perturbation
    if perturbation is not None:
        for bus_id, offset in perturbation.theta.items():
            theta[net.index_of(int(bus_id))] += offset
        for bus_id, offset in perturbation.omega.items():
            omega[net.index_of(int(bus_id))] += offset
        if perturbation.ctrl is not None:
            ctrl = ctrl + perturbation.ctrl
    return SystemState(0.0, theta, omega, ctrl), eq


def _final_price(scenario: Scenario, cost: CostModel, u: np.ndarray, ctrl: np.ndarray) -> float:
    """Price read off the final controller state (mean marginal cost for per-bus controllers)."""
    spec = scenario.controller
    if spec.state_size == 1:
        return float(ctrl[0])
    mask = cost.unconstrained_mask(u)
    if isinstance(spec, DAISpec) and spec.cheaters:
        mask = mask.copy()
        mask[list(spec.cheaters)] = False
    if not np.any(mask):
        return math.nan
    try:
        return float(np.mean(cost.marginal_all(u, mask)[mask]))
    except CostDomainError:
        return math.nan


def _safe_dispatch_cost(cost: CostModel, u: np.ndarray) -> float:
    try:
        return dispatch_cost(cost, u)
    except CostDomainError:
        return math.inf


def run_scenario(scenario: Scenario, write_outputs: bool = True) -> ScenarioResult:
    """Simulate ``scenario`` and assemble its summary.

    Raises:
        InfeasibleDispatchError: the post-disturbance dispatch is infeasible.
        IntegratorError: a time step failed after all retries.
    """
    started = time.perf_counter()
    net, spec = scenario.network, scenario.controller
    case_cost = scenario.cost
    alloc = allocation_cost(spec)
    metric_cost = alloc or case_cost
    P_final = injections_after(net, scenario.disturbances, 0.0, scenario.horizon)
    logger.info("Running scenario %s (%s on %s, horizon %.6g s)", scenario.id, scenario.variant, net.name, scenario.horizon)

    feasibility = check_feasibility(DispatchProblem(metric_cost, P_final))
    logger.info("Post-disturbance dispatch %s", feasibility.describe())
    if alloc is not None:
        require_feasible(DispatchProblem(alloc, P_final))

    initial, _ = _initial_state(scenario)

    target: Optional[Equilibrium] = None
    if alloc is not None:
        try:
            target = find_equilibrium(net, alloc, P=P_final)
        except EquilibriumNotFoundError as exc:
            logger.warning("Scenario %s: no post-disturbance equilibrium (%s)", scenario.id, exc)

    recorder = TrajectoryRecorder(net.n_buses, net.bus_ids, scenario.id, scenario.variant)
    unsupported = hamiltonian_supported(spec)
    if unsupported is None and target is not None:

        def record_h(theta: np.ndarray, omega: np.ndarray, ctrl: np.ndarray) -> float:
            return hamiltonian(net, spec, SystemState(0.0, theta, omega, ctrl), target)

        recorder.hamiltonian = record_h

    simulation = simulate(net, spec, initial, scenario.horizon, scenario.integrator, scenario.disturbances, recorder)
    traj = simulation.trajectory
    metrics = frequency_metrics(traj, scenario.settle_threshold)
    if not metrics.settled:
        logger.warning("Scenario %s did not settle below %.3g rad/s", scenario.id, metrics.threshold)

    u_final = traj.final_u
    ctrl_final = traj.final_ctrl
    summary: dict[str, Any] = {
        "scenario": scenario.id,
        "variant": scenario.variant,
        "case": net.name,
        "horizon": scenario.horizon,
        "dt": scenario.integrator.dt,
        "seed": scenario.seed,
        "samples": len(traj),
        "steps": simulation.steps,
        "nadir": metrics.nadir,
        "settling_time": metrics.settling_time,
        "settle_threshold": metrics.threshold,
        "steady_state_error": metrics.steady_state_error,
        "final_max_abs_omega": float(np.max(np.abs(traj.omega[-1]))),
        "final_sync_frequency": sync_frequency(net, u_final, P_final),
        "control_effort": control_effort(traj),
        "final_spread": marginal_cost_spread(metric_cost, u_final),
        "max_spread": float(np.max(spread_series(metric_cost, traj))),
        "feasible": feasibility.feasible,
        "hamiltonian": "recorded" if recorder.hamiltonian is not None else (unsupported or "no equilibrium"),
    }
    if isinstance(spec, GatherBroadcastSpec):
        summary["reduction"] = reduction_check(spec, net).label
    if isinstance(spec, DecentralizedIntegralSpec) and np.any(spec.biases != 0):
        summary["biases"] = [float(b) for b in spec.biases[spec.mask]]

    optimum: Optional[DispatchSolution] = None
    kkt: Optional[KKTReport] = None
    if feasibility.feasible:
        problem = DispatchProblem(metric_cost, P_final)
        optimum = solve_market_clearing(problem)
        price = _final_price(scenario, metric_cost, u_final, ctrl_final)
        kkt = verify_kkt(problem, DispatchSolution(u_final, price, 0, 0.0), KKT_TOL)
        optimal_cost = _safe_dispatch_cost(metric_cost, optimum.u_star)
        achieved = _safe_dispatch_cost(metric_cost, u_final)
        summary.update(
            {
                "lambda_star": optimum.lambda_star,
                "final_price": price,
                "max_abs_u_gap": float(np.max(np.abs(u_final - optimum.u_star))),
                "dispatch_cost": achieved,
                "optimal_dispatch_cost": optimal_cost,
                "dispatch_cost_gap": achieved - optimal_cost,
            }
        )
        summary.update(kkt.as_dict())
        if isinstance(spec, DAISpec) and spec.cheaters:
            honest = spec.controlled.copy()
            honest[list(spec.cheaters)] = False
            summary["honest_max_abs_u"] = float(np.max(np.abs(u_final[honest]))) if np.any(honest) else 0.0
            summary["cheater_balance_error"] = abs(float(np.sum(u_final[list(spec.cheaters)]) + np.sum(P_final)))
            for index in sorted(spec.cheaters):
                bus_id = net.bus_ids[index]
                try:
                    summary[f"cheater_{bus_id}_profit"] = unit_profit(metric_cost, index, float(u_final[index]), optimum.lambda_star)
                except CostDomainError:
                    summary[f"cheater_{bus_id}_profit"] = math.nan
                summary[f"cheater_{bus_id}_honest_profit"] = unit_profit(
                    metric_cost, index, float(optimum.u_star[index]), optimum.lambda_star
                )

    outputs: dict[str, Path] = {}
    if write_outputs:
        if scenario.csv_path is not None:
            outputs["csv"] = write_trajectory_csv(traj, scenario.csv_path)
        if scenario.summary_path is not None:
            outputs["summary"] = write_summary(summary, scenario.summary_path)

    logger.info(
        "Scenario %s finished in %.2f s: nadir %.4g, settling %s, final spread %.3g",
        scenario.id,
        time.perf_counter() - started,
        metrics.nadir,
        "none" if metrics.settling_time is None else f"{metrics.settling_time:.3f} s",
        summary["final_spread"],
    )
    return ScenarioResult(scenario.id, scenario.variant, traj, metrics, summary, kkt, optimum, target, outputs)
