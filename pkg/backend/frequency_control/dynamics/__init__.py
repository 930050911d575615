# Dynamics package
# Closed-loop differential-algebraic model, RK4 integration and equilibria

from backend.frequency_control.dynamics.algebraic import AlgebraicSolution, solve_algebraic
from backend.frequency_control.dynamics.closed_loop import ClosedLoop, Derivatives, rhs
from backend.frequency_control.dynamics.equilibrium import (
    Equilibrium,
    allocation_cost,
    controller_equilibrium,
    equilibrium_state,
    find_equilibrium,
    solve_power_flow,
)
from backend.frequency_control.dynamics.integrator import Disturbance, Simulation, injections_after, simulate, step
from backend.frequency_control.dynamics.state import IntegratorConfig, SystemState

__all__ = [
    "AlgebraicSolution",
    "ClosedLoop",
    "Derivatives",
    "Disturbance",
    "Equilibrium",
    "IntegratorConfig",
    "Simulation",
    "SystemState",
    "allocation_cost",
    "controller_equilibrium",
    "equilibrium_state",
    "find_equilibrium",
    "injections_after",
    "rhs",
    "simulate",
    "solve_algebraic",
    "solve_power_flow",
    "step",
]
