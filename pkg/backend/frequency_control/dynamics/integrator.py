"""
Integrator
Fixed-step classical Runge-Kutta on the reduced closed loop, with step
disturbances applied between segments.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

import numpy as np

from backend.frequency_control.analysis.trajectory import TrajectoryRecord, TrajectoryRecorder
from backend.frequency_control.controllers.specs import ControllerSpec
from backend.frequency_control.dynamics.closed_loop import ClosedLoop, Derivatives
from backend.frequency_control.dynamics.state import IntegratorConfig, SystemState
from backend.frequency_control.network.model import NetworkModel
from backend.shared.utils.errors import AlgebraicSolveError, GridLabError, IntegratorError, SecurityRegionError

logger = logging.getLogger(__name__)

STEP_COUNT_SLACK = 1e-9


class NonFiniteStateError(GridLabError):
    """A Runge-Kutta stage left the finite range; the step is retried shorter."""


@dataclass(frozen=True)
class Disturbance:
    """Step change ``delta_p`` (per-unit) of the fixed injection at bus index ``bus``, from time ``t`` on."""

    t: float
    bus: int
    delta_p: float


class Simulation(NamedTuple):
    trajectory: TrajectoryRecord
    final_state: SystemState
    injections: np.ndarray
    steps: int


def _rk4(loop: ClosedLoop, x: np.ndarray, first: Derivatives, h: float, P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k1 = first
    k2 = loop.evaluate(x + 0.5 * h * k1.dx, k1.theta_p, P)
    k3 = loop.evaluate(x + 0.5 * h * k2.dx, k2.theta_p, P)
    k4 = loop.evaluate(x + h * k3.dx, k3.theta_p, P)
    x_next = x + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx)
    return x_next, k4.theta_p


def _advance(
    loop: ClosedLoop,
    x: np.ndarray,
    current: Derivatives,
    t: float,
    h: float,
    P: np.ndarray,
    max_halvings: int,
) -> tuple[np.ndarray, Derivatives]:
    """One accepted step of length h.

    Retried as 2, 4, ... substeps when the inner solve fails or the state
    stops being finite.
    """
    failure: Optional[GridLabError] = None
    for halving in range(max_halvings + 1):
        substeps = 2**halving
        sub_h = h / substeps
        try:
            x_sub, evaluation = x, current
            for _ in range(substeps):
                with np.errstate(over="ignore", invalid="ignore"):
                    x_sub, theta_p = _rk4(loop, x_sub, evaluation, sub_h, P)
                    if not np.all(np.isfinite(x_sub)):
                        raise NonFiniteStateError(f"non-finite state after a step of {sub_h:.3e} s")
                    evaluation = loop.evaluate(x_sub, theta_p, P)
                if not (np.all(np.isfinite(evaluation.dx)) and np.all(np.isfinite(evaluation.u))):
                    raise NonFiniteStateError(f"non-finite derivative after a step of {sub_h:.3e} s")
            if halving:
                logger.debug("step at t=%.6f accepted after %d halvings", t, halving)
            return x_sub, evaluation
        except (AlgebraicSolveError, SecurityRegionError, NonFiniteStateError) as exc:
            failure = exc
            logger.debug("step at t=%.6f rejected (h=%.3e): %s", t, sub_h, exc)
    raise IntegratorError(f"integration failed at t={t:.6f} s after {max_halvings} step halvings: {failure}", t=t)


def _state_from(t: float, x: np.ndarray, loop: ClosedLoop, evaluation: Derivatives) -> SystemState:
    return SystemState(t=t, theta=evaluation.theta.copy(), omega=evaluation.omega.copy(), ctrl=loop.unpack(x)[2].copy())


def _initial_evaluation(loop: ClosedLoop, x: np.ndarray, guess: np.ndarray, P: np.ndarray, t: float) -> Derivatives:
    try:
        return loop.evaluate(x, guess, P)
    except (AlgebraicSolveError, SecurityRegionError) as exc:
        raise IntegratorError(f"inconsistent state at t={t:.6f} s: {exc}", t=t) from exc


def step(
    net: NetworkModel,
    spec: ControllerSpec,
    state: SystemState,
    config: Optional[IntegratorConfig] = None,
    P: Optional[np.ndarray] = None,
) -> SystemState:
    """Advance ``state`` by one step of ``config.dt``; the result is algebraically consistent."""
    config = config or IntegratorConfig()
    injections = net.P.copy() if P is None else net.check_dimension(P, "P")
    loop = ClosedLoop(net, spec, config.newton_tol, config.newton_max_iter)
    x = loop.pack(state)
    current = _initial_evaluation(loop, x, np.asarray(state.theta, dtype=float)[net.passive_idx], injections, state.t)
    x_next, evaluation = _advance(loop, x, current, state.t, config.dt, injections, config.max_halvings)
    return _state_from(state.t + config.dt, x_next, loop, evaluation)


def injections_after(net: NetworkModel, disturbances: Iterable[Disturbance], t0: float, horizon: float) -> np.ndarray:
    """Fixed injections in force at the end of a run (disturbances at the final instant excluded)."""
    P = net.P.copy()
    for d in disturbances:
        if d.t < t0 + horizon:
            P[d.bus] += d.delta_p
    return P


def _segments(t0: float, end: float, disturbances: list[Disturbance]) -> list[float]:
    inner = sorted({d.t for d in disturbances if t0 < d.t < end})
    return [t0] + inner + [end]


def simulate(
    net: NetworkModel,
    spec: ControllerSpec,
    initial: SystemState,
    horizon: float,
    config: Optional[IntegratorConfig] = None,
    disturbances: Iterable[Disturbance] = (),
    recorder: Optional[TrajectoryRecorder] = None,
) -> Simulation:
    """Integrate from ``initial`` over ``horizon`` seconds.

    Disturbances at or before the initial time act from the start; those at the
    final time have no effect. Each inter-disturbance segment is split into
    equal steps no longer than ``config.dt``.
    """
    config = config or IntegratorConfig()
    if not horizon > 0:
        raise GridLabError(f"horizon must be positive, got {horizon}")
    disturbances = sorted(disturbances, key=lambda d: d.t)
    for disturbance in disturbances:
        if not 0 <= disturbance.bus < net.n_buses:
            raise GridLabError(f"disturbance bus index {disturbance.bus} outside 0..{net.n_buses - 1}")

    t0 = float(initial.t)
    end = t0 + float(horizon)
    injections = net.P.copy()
    pending = list(disturbances)

    def apply_due(now: float) -> bool:
        changed = False
        while pending and pending[0].t <= now:
            d = pending.pop(0)
            injections[d.bus] += d.delta_p
            changed = True
            logger.info("Applied disturbance of %+.6g pu at bus %s (t=%.6g s)", d.delta_p, net.bus_ids[d.bus], d.t)
        return changed

    apply_due(t0)
    recorder = recorder or TrajectoryRecorder(net.n_buses, net.bus_ids)
    loop = ClosedLoop(net, spec, config.newton_tol, config.newton_max_iter)
    x = loop.pack(initial)
    current = _initial_evaluation(loop, x, np.asarray(initial.theta, dtype=float)[net.passive_idx], injections, t0)
    recorder.record(t0, current.theta, current.omega, loop.unpack(x)[2], current.u)

    bounds = _segments(t0, end, pending)
    step_count = 0
    t = t0
    for a, b in zip(bounds[:-1], bounds[1:]):
        if a > t0 and apply_due(a):
            current = _initial_evaluation(loop, x, current.theta_p, injections, a)
        n_steps = max(1, math.ceil((b - a) / config.dt - STEP_COUNT_SLACK))
        h = (b - a) / n_steps
        for k in range(1, n_steps + 1):
            x, current = _advance(loop, x, current, t, h, injections, config.max_halvings)
            t = b if k == n_steps else a + k * h
            step_count += 1
            last = b == end and k == n_steps
            if step_count % config.record_every == 0 or last:
                recorder.record(t, current.theta, current.omega, loop.unpack(x)[2], current.u)

    logger.debug("simulated %d steps over %.6g s", step_count, horizon)
    final = _state_from(end, x, loop, current)
    return Simulation(recorder.build(), final, injections, step_count)
