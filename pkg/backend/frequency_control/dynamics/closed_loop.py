"""
Closed Loop
Right-hand side of the network/controller system reduced to an explicit ODE.

Differential states are packed as [θ on generator and droop buses, ω on
generators, controller state]. Passive angles are algebraic and re-solved at
every evaluation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from backend.frequency_control.controllers.laws import controller_output, controller_rhs, n_buses_of
from backend.frequency_control.controllers.specs import ControllerSpec, GatherBroadcastSpec, PassiveMode
from backend.frequency_control.dynamics.algebraic import assemble_angles, solve_algebraic
from backend.frequency_control.dynamics.state import SystemState
from backend.frequency_control.network.flows import flow_injections, hessian
from backend.frequency_control.network.model import NetworkModel
from backend.shared.utils.errors import DimensionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Derivatives:
    """One right-hand-side evaluation plus the algebraic quantities it produced."""

    dx: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    u: np.ndarray
    dctrl: np.ndarray
    theta_p: np.ndarray
    newton_iterations: int


class ClosedLoop:
    def __init__(
        self,
        net: NetworkModel,
        spec: ControllerSpec,
        newton_tol: float = 1e-10,
        newton_max_iter: int = 50,
        passive_rates: Optional[bool] = None,
    ):
        self.net = net
        self.spec = spec
        self.newton_tol = newton_tol
        self.newton_max_iter = newton_max_iter
        n_ctrl = spec.state_size
        if n_buses_of(spec) != net.n_buses:
            raise DimensionError(f"controller is sized for a different network than {net.name} ({net.n_buses} buses)")
        if passive_rates is None:
            passive_rates = isinstance(spec, GatherBroadcastSpec) and spec.passive_mode is PassiveMode.IMPLICIT
        self.passive_rates = bool(passive_rates) and len(net.passive_idx) > 0

        self.dyn = net.dynamic_idx
        self.gen = net.generator_idx
        self.resp = net.responsive_idx
        self.passive = net.passive_idx
        # positions of generator / droop buses inside the θ_dyn block
        self._gen_pos = np.searchsorted(self.dyn, self.gen)
        self._resp_pos = np.searchsorted(self.dyn, self.resp)
        self._n_dyn = len(self.dyn)
        self._n_gen = len(self.gen)
        self.size = self._n_dyn + self._n_gen + n_ctrl

    def pack(self, state: SystemState) -> np.ndarray:
        return np.concatenate([state.theta[self.dyn], state.omega[self.gen], np.asarray(state.ctrl, dtype=float)])

    def unpack(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        theta_dyn = x[: self._n_dyn]
        omega_g = x[self._n_dyn : self._n_dyn + self._n_gen]
        ctrl = x[self._n_dyn + self._n_gen :]
        return theta_dyn, omega_g, ctrl

    def evaluate(self, x: np.ndarray, theta_p_guess: Optional[np.ndarray] = None, P: Optional[np.ndarray] = None) -> Derivatives:
        net = self.net
        injections = net.P if P is None else P
        theta_dyn, omega_g, ctrl = self.unpack(x)
        u = controller_output(self.spec, ctrl)

        solution = solve_algebraic(
            net, theta_dyn, u, guess=theta_p_guess, tol=self.newton_tol, max_iter=self.newton_max_iter, P=injections
        )
        theta = assemble_angles(net, theta_dyn, solution.theta_p)
        mismatch = injections + u - flow_injections(net, theta)

        omega = np.zeros(net.n_buses)
        omega[self.gen] = omega_g
        omega[self.resp] = mismatch[self.resp] / net.D[self.resp]
        if self.passive_rates:
            # differentiate the passive balance: H_PP θ̇_P + H_PD θ̇_D = 0 at fixed u
            H = hessian(net, theta)
            rates_dyn = omega[self.dyn]
            omega[self.passive] = -np.linalg.solve(H[np.ix_(self.passive, self.passive)], H[np.ix_(self.passive, self.dyn)] @ rates_dyn)

        dtheta_dyn = np.empty(self._n_dyn)
        dtheta_dyn[self._gen_pos] = omega_g
        dtheta_dyn[self._resp_pos] = omega[self.resp]
        domega_g = (-net.D[self.gen] * omega_g + mismatch[self.gen]) / net.M[self.gen]
        dctrl = controller_rhs(self.spec, ctrl, omega, u)

        return Derivatives(
            dx=np.concatenate([dtheta_dyn, domega_g, dctrl]),
            theta=theta,
            omega=omega,
            u=u,
            dctrl=dctrl,
            theta_p=solution.theta_p,
            newton_iterations=solution.iterations,
        )


def rhs(
    net: NetworkModel,
    spec: ControllerSpec,
    state: SystemState,
    P: Optional[np.ndarray] = None,
    passive_rates: Optional[bool] = None,
    newton_tol: float = 1e-10,
    newton_max_iter: int = 50,
) -> Derivatives:
    """Evaluate the closed loop at ``state``; passive angles in the state seed the inner solve.

    The cost model travels inside the controller spec.
    """
    loop = ClosedLoop(net, spec, newton_tol, newton_max_iter, passive_rates)
    guess = np.asarray(state.theta, dtype=float)[net.passive_idx]
    return loop.evaluate(loop.pack(state), guess, P)
