"""
Passive-bus power balance 0 = P_i + u_i − f_i(θ), solved for θ_P by damped Newton.
"""

from __future__ import annotations

import logging
from typing import NamedTuple, Optional

import numpy as np

from backend.frequency_control.network.flows import flow_injections, hessian
from backend.frequency_control.network.model import NetworkModel
from backend.shared.utils.common import as_vector
from backend.shared.utils.errors import AlgebraicSolveError, SecurityRegionError

logger = logging.getLogger(__name__)

MAX_HALVINGS = 12
ARMIJO_C = 1e-4
COND_LIMIT = 1e12


class AlgebraicSolution(NamedTuple):
    theta_p: np.ndarray
    iterations: int
    residual: float


def assemble_angles(net: NetworkModel, theta_dyn: np.ndarray, theta_p: np.ndarray) -> np.ndarray:
    theta = np.empty(net.n_buses)
    theta[net.dynamic_idx] = theta_dyn
    theta[net.passive_idx] = theta_p
    return theta


def passive_residual(net: NetworkModel, theta: np.ndarray, u: np.ndarray, P: Optional[np.ndarray] = None) -> np.ndarray:
    injections = net.P if P is None else P
    return (injections + u - flow_injections(net, theta))[net.passive_idx]


def solve_algebraic(
    net: NetworkModel,
    theta_dyn: np.ndarray,
    u: np.ndarray,
    guess: Optional[np.ndarray] = None,
    tol: float = 1e-10,
    max_iter: int = 50,
    P: Optional[np.ndarray] = None,
) -> AlgebraicSolution:
    """Angles of the passive buses for fixed dynamic angles and injections.

    The Newton matrix is the passive block of the power-flow Hessian.

    Raises:
        SecurityRegionError: the passive block is (numerically) singular.
        AlgebraicSolveError: damped Newton made no progress or ran out of iterations.
    """
    passive = net.passive_idx
    theta_dyn = as_vector(theta_dyn, len(net.dynamic_idx), "theta_dyn")
    u = net.check_dimension(u, "u")
    if len(passive) == 0:
        return AlgebraicSolution(np.empty(0), 0, 0.0)
    guess = np.zeros(len(passive)) if guess is None else as_vector(guess, len(passive), "guess")

    theta = assemble_angles(net, theta_dyn, guess)
    g = passive_residual(net, theta, u, P)
    norm = float(np.max(np.abs(g)))
    for iteration in range(max_iter + 1):
        if norm <= tol:
            logger.debug("algebraic solve converged in %d iterations (residual %.3e)", iteration, norm)
            return AlgebraicSolution(theta[passive].copy(), iteration, norm)
        if iteration == max_iter:
            break
        block = hessian(net, theta)[np.ix_(passive, passive)]
        if not np.all(np.isfinite(block)) or np.linalg.cond(block) > COND_LIMIT:
            raise SecurityRegionError(
                f"passive-bus Jacobian is singular (angles left the security region near bus {net.bus_ids[passive[int(np.argmax(np.abs(g)))]]})"
            )
        direction = np.linalg.solve(block, g)
        t = 1.0
        for _ in range(MAX_HALVINGS):
            trial = theta.copy()
            trial[passive] += t * direction
            g_trial = passive_residual(net, trial, u, P)
            norm_trial = float(np.max(np.abs(g_trial)))
            if norm_trial <= (1.0 - ARMIJO_C * t) * norm:
                theta, g, norm = trial, g_trial, norm_trial
                break
            t *= 0.5
        else:
            worst = int(passive[int(np.argmax(np.abs(g)))])
            raise AlgebraicSolveError(
                f"passive-bus Newton stalled at residual {norm:.3e} (worst bus {net.bus_ids[worst]})", worst_bus=worst, residual=norm
            )
    worst = int(passive[int(np.argmax(np.abs(g)))])
    raise AlgebraicSolveError(
        f"passive-bus Newton did not converge in {max_iter} iterations (residual {norm:.3e}, worst bus {net.bus_ids[worst]})",
        worst_bus=worst,
        residual=norm,
    )
