"""
Equilibrium
Synchronous steady states: clearing price, optimal injections and the angles
that carry them, with bus 0 pinned as the angle reference.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from backend.frequency_control.controllers.laws import initial_state
from backend.frequency_control.controllers.specs import (
    AGCSpec,
    ControllerSpec,
    DAISpec,
    DecentralizedIntegralSpec,
    GatherBroadcastSpec,
)
from backend.frequency_control.costs.model import CostModel
from backend.frequency_control.dispatch.market import solve_market_clearing
from backend.frequency_control.dispatch.problem import DispatchProblem
from backend.frequency_control.dynamics.state import SystemState
from backend.frequency_control.network.flows import SecurityReport, check_security, flow_injections, hessian
from backend.frequency_control.network.model import NetworkModel
from backend.shared.utils.errors import EquilibriumNotFoundError, GridLabError

logger = logging.getLogger(__name__)

BALANCE_TOL = 1e-8
MAX_HALVINGS = 20
ARMIJO_C = 1e-4


@dataclass(frozen=True, eq=False)
class Equilibrium:
    theta: np.ndarray
    lambda_star: Optional[float]
    u: np.ndarray
    injections: np.ndarray
    security: SecurityReport
    residual: float
    iterations: int
    warnings: tuple[str, ...] = ()

    @property
    def omega(self) -> np.ndarray:
        return np.zeros(len(self.theta))

    def as_dict(self, net: NetworkModel) -> dict:
        return {
            "lambda_star": self.lambda_star,
            "theta": self.theta.tolist(),
            "u": self.u.tolist(),
            "residual": self.residual,
            "newton_iterations": self.iterations,
            "secure": self.security.secure,
            "security": self.security.describe(net),
            "warnings": list(self.warnings),
        }


def solve_power_flow(
    net: NetworkModel, target: np.ndarray, tol: float = 1e-10, max_iter: int = 50
) -> tuple[np.ndarray, float, int]:
    """Angles θ with ∇U(θ) = target and θ_0 = 0, by damped Newton from the flat start."""
    target = net.check_dimension(target, "target")
    scale = max(1.0, float(np.sum(np.abs(target))))
    imbalance = float(np.sum(target))
    if abs(imbalance) > BALANCE_TOL * scale:
        raise EquilibriumNotFoundError(f"steady-state injections do not balance (sum {imbalance:.3e})")

    theta = np.zeros(net.n_buses)
    g = flow_injections(net, theta) - target
    norm = float(np.max(np.abs(g)))
    for iteration in range(max_iter + 1):
        if norm <= tol:
            return theta, norm, iteration
        if iteration == max_iter:
            break
        J = hessian(net, theta)[1:, 1:]
        if not np.all(np.isfinite(J)) or np.linalg.cond(J) > 1e12:
            raise EquilibriumNotFoundError("reduced power-flow Jacobian became singular; the injections may exceed the transfer capacity")
        direction = -np.linalg.solve(J, g[1:])
        t = 1.0
        for _ in range(MAX_HALVINGS):
            trial = theta.copy()
            trial[1:] += t * direction
            g_trial = flow_injections(net, trial) - target
            norm_trial = float(np.max(np.abs(g_trial)))
            if norm_trial <= (1.0 - ARMIJO_C * t) * norm:
                theta, g, norm = trial, g_trial, norm_trial
                break
            t *= 0.5
        else:
            raise EquilibriumNotFoundError(f"power-flow Newton stalled at residual {norm:.3e}; no feasible power flow found")
    raise EquilibriumNotFoundError(f"power-flow Newton did not converge in {max_iter} iterations (residual {norm:.3e})")


def _assemble(
    net: NetworkModel, P: np.ndarray, u: np.ndarray, lambda_star: Optional[float], tol: float, max_iter: int
) -> Equilibrium:
    theta, residual, iterations = solve_power_flow(net, P + u, tol, max_iter)
    security = check_security(net, theta)
    warnings: tuple[str, ...] = ()
    if not security.secure:
        message = f"equilibrium outside the security region ({security.describe(net)})"
        logger.warning("%s: %s", net.name, message)
        warnings = (message,)
    logger.debug("equilibrium for %s found in %d Newton iterations (residual %.3e)", net.name, iterations, residual)
    return Equilibrium(theta, lambda_star, u, P.copy(), security, residual, iterations, warnings)


def find_equilibrium(
    net: NetworkModel,
    cost: CostModel,
    lambda_star: Optional[float] = None,
    P: Optional[np.ndarray] = None,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> Equilibrium:
    """Closed-loop equilibrium for optimal-allocation controllers.

    Without ``lambda_star`` the clearing price comes from the market-clearing
    solver; a supplied price must balance the injections.
    """
    injections = net.P.copy() if P is None else net.check_dimension(P, "P")
    if lambda_star is None:
        solution = solve_market_clearing(DispatchProblem(cost, injections))
        lam, u = solution.lambda_star, solution.u_star
    else:
        lam = float(lambda_star)
        u = cost.inverse_marginal_all(lam)
    return _assemble(net, injections, u, lam, tol, max_iter)


def allocation_cost(spec: ControllerSpec) -> Optional[CostModel]:
    """Cost model whose optimal allocation a controller reaches in steady state."""
    if isinstance(spec, (GatherBroadcastSpec, DAISpec)):
        return spec.cost
    if isinstance(spec, AGCSpec):
        return CostModel.scaled(spec.participation)
    return None


def controller_equilibrium(
    net: NetworkModel, spec: ControllerSpec, P: Optional[np.ndarray] = None, tol: float = 1e-10, max_iter: int = 50
) -> tuple[Equilibrium, np.ndarray]:
    """Equilibrium plus the matching controller state.

    Decentralized integrators have no preferred allocation; the imbalance is
    split equally over the controlled buses.
    """
    injections = net.P.copy() if P is None else net.check_dimension(P, "P")
    cost = allocation_cost(spec)
    if cost is not None:
        eq = find_equilibrium(net, cost, P=injections, tol=tol, max_iter=max_iter)
        ctrl = initial_state(spec, eq.u) if isinstance(spec, DAISpec) else initial_state(spec, eq.lambda_star)
        return eq, ctrl
    if not isinstance(spec, DecentralizedIntegralSpec):
        raise GridLabError(f"unsupported controller spec {type(spec).__name__}")
    u = np.zeros(net.n_buses)
    demand = float(np.sum(injections))
    if demand != 0.0:
        u[list(spec.controlled)] = -demand / len(spec.controlled)
    eq = _assemble(net, injections, u, None, tol, max_iter)
    return eq, initial_state(spec, u)


def equilibrium_state(eq: Equilibrium, ctrl: np.ndarray, t: float = 0.0) -> SystemState:
    return SystemState(t=t, theta=eq.theta.copy(), omega=np.zeros(len(eq.theta)), ctrl=np.array(ctrl, dtype=float))
