"""
Diagnostics
Synchronous frequency, the closed-loop Hamiltonian and marginal-cost agreement.

H(θ, ω, λ) = D_U(θ; θ*) + ½ ωᵀMω + k'·D_I(λ; λ*), with D_f the Bregman
distance of f. Along gather-and-broadcast trajectories whose measurement
weights are proportional to the cost weights, dH/dt = −ωᵀDω.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from backend.frequency_control.controllers.specs import ControllerSpec, GatherBroadcastSpec
from backend.frequency_control.costs.lure import bregman_lure
from backend.frequency_control.costs.model import CostModel
from backend.frequency_control.dynamics.closed_loop import ClosedLoop
from backend.frequency_control.dynamics.equilibrium import Equilibrium
from backend.frequency_control.dynamics.state import SystemState
from backend.frequency_control.network.flows import flow_injections, potential
from backend.frequency_control.network.model import NetworkModel
from backend.shared.utils.common import as_vector
from backend.shared.utils.errors import GridLabError, UnsupportedDiagnosticError

logger = logging.getLogger(__name__)

PROPORTIONAL_RTOL = 1e-9


def sync_frequency(net: NetworkModel, u: np.ndarray, P: Optional[np.ndarray] = None) -> float:
    """ω_sync = Σ(P_i + u_i) / Σ D_i over generator and droop buses."""
    u = net.check_dimension(u, "u")
    injections = net.P if P is None else net.check_dimension(P, "P")
    total = net.total_damping
    if not total > 0:
        raise GridLabError("total damping must be positive to define a synchronous frequency")
    return float(np.sum(injections + u)) / total


def dissipation(net: NetworkModel, omega: np.ndarray) -> float:
    """−ωᵀDω over generator and droop buses."""
    omega = net.check_dimension(omega, "omega")
    dyn = net.dynamic_idx
    return -float(np.sum(net.D[dyn] * omega[dyn] ** 2))


def hamiltonian_supported(spec: ControllerSpec) -> Optional[str]:
    """None when the Hamiltonian is a valid storage function for ``spec``, else the reason."""
    if not isinstance(spec, GatherBroadcastSpec):
        return f"the Hamiltonian is defined for gather-and-broadcast control only, not {spec.variant.value}"
    cost = spec.cost
    if cost.has_active_box:
        return "the Hamiltonian needs unclipped responses; the cost model has active bounds"
    if not np.allclose(spec.weights * cost.weights.sum(), cost.weights, rtol=PROPORTIONAL_RTOL, atol=1e-15):
        return "the Hamiltonian needs measurement weights proportional to the cost weights"
    return None


def _require_supported(spec: ControllerSpec) -> GatherBroadcastSpec:
    reason = hamiltonian_supported(spec)
    if reason is not None:
        raise UnsupportedDiagnosticError(reason)
    return spec


def _angle_bregman(net: NetworkModel, theta: np.ndarray, theta_star: np.ndarray) -> float:
    return potential(net, theta) - potential(net, theta_star) - float(flow_injections(net, theta_star) @ (theta - theta_star))


def hamiltonian(net: NetworkModel, spec: ControllerSpec, state: SystemState, equilibrium: Equilibrium) -> float:
    spec = _require_supported(spec)
    theta = net.check_dimension(state.theta, "theta")
    omega = net.check_dimension(state.omega, "omega")
    gen = net.generator_idx
    kinetic = 0.5 * float(np.sum(net.M[gen] * omega[gen] ** 2))
    price = bregman_lure(spec.cost, float(state.ctrl[0]), float(equilibrium.lambda_star))
    return _angle_bregman(net, theta, equilibrium.theta) + kinetic + spec.lyapunov_gain * price


def hamiltonian_rate(
    net: NetworkModel,
    spec: ControllerSpec,
    state: SystemState,
    equilibrium: Equilibrium,
    P: Optional[np.ndarray] = None,
) -> float:
    """Exact dH/dt from one closed-loop evaluation, passive angle rates included."""
    spec = _require_supported(spec)
    injections = equilibrium.injections if P is None else net.check_dimension(P, "P")
    loop = ClosedLoop(net, spec, passive_rates=True)
    evaluation = loop.evaluate(loop.pack(state), np.asarray(state.theta, dtype=float)[net.passive_idx], injections)
    _, domega_g, dctrl = loop.unpack(evaluation.dx)

    f = flow_injections(net, evaluation.theta)
    f_star = flow_injections(net, equilibrium.theta)
    angle_rate = float((f - f_star) @ evaluation.omega)
    gen = net.generator_idx
    kinetic_rate = float(np.sum(net.M[gen] * evaluation.omega[gen] * domega_g))
    base = spec.cost.base
    price_rate = spec.lyapunov_gain * float(base(state.ctrl[0]) - base(equilibrium.lambda_star)) * float(dctrl[0])
    return angle_rate + kinetic_rate + price_rate


def marginal_cost_spread(cost: CostModel, u: np.ndarray) -> float:
    """Largest marginal-cost difference among controlled buses strictly inside their bounds."""
    u = as_vector(u, cost.n_buses, "u")
    mask = cost.unconstrained_mask(u)
    if np.count_nonzero(mask) < 2:
        return 0.0
    values = cost.marginal_all(u, mask)[mask]
    return float(np.max(values) - np.min(values))
