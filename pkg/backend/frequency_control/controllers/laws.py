"""
Control Laws
Controller state derivative and injection output for every variant.

The controller state is a flat float vector: one entry (the broadcast price)
for gather-and-broadcast and AGC, one entry per bus otherwise.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from backend.frequency_control.controllers.specs import (
    AGCSpec,
    ControllerSpec,
    DAISpec,
    DecentralizedIntegralSpec,
    GatherBroadcastSpec,
)
from backend.shared.utils.common import as_vector
from backend.shared.utils.errors import DimensionError


def n_buses_of(spec: ControllerSpec) -> int:
    if isinstance(spec, (GatherBroadcastSpec, DAISpec)):
        return spec.cost.n_buses
    if isinstance(spec, AGCSpec):
        return len(spec.participation)
    return len(spec.gains)


def initial_state(spec: ControllerSpec, value: float | np.ndarray = 0.0) -> np.ndarray:
    """Controller state filled with ``value`` (a scalar price or a per-bus vector)."""
    size = spec.state_size
    if np.ndim(value) == 0:
        return np.full(size, float(value))
    return np.array(as_vector(value, size, "controller state"), dtype=float)


def _check_state(spec: ControllerSpec, state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=float)
    if state.shape != (spec.state_size,):
        raise DimensionError(f"controller state must have shape ({spec.state_size},), got {state.shape}")
    return state


def controller_output(spec: ControllerSpec, state: np.ndarray) -> np.ndarray:
    """Per-bus injections u produced by the controller state."""
    state = _check_state(spec, state)
    if isinstance(spec, GatherBroadcastSpec):
        return spec.cost.inverse_marginal_all(state[0])
    if isinstance(spec, AGCSpec):
        return spec.participation * state[0]
    if isinstance(spec, DecentralizedIntegralSpec):
        return np.where(spec.mask, state, 0.0)
    return np.where(spec.controlled, state, 0.0)


def reported_marginals(spec: DAISpec, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """True marginal costs and the values exchanged over the communication graph."""
    controlled = spec.controlled
    true = np.zeros(len(u))
    for i in np.flatnonzero(controlled):
        true[i] = spec.cost.marginal(int(i), float(u[i]))
    reported = true.copy()
    if spec.cheaters:
        reported[list(spec.cheaters)] = 0.0
    return true, reported


def controller_rhs(
    spec: ControllerSpec,
    state: np.ndarray,
    omega: np.ndarray,
    u_current: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Time derivative of the controller state given bus frequencies ω."""
    state = _check_state(spec, state)
    n = n_buses_of(spec)
    omega = as_vector(omega, n, "omega")

    if isinstance(spec, GatherBroadcastSpec):
        return np.array([-(spec.signal_scale * float(np.dot(spec.weights, omega))) / spec.k])
    if isinstance(spec, AGCSpec):
        return np.array([-(spec.signal_scale * float(omega[spec.measurement_bus])) / spec.k])
    if isinstance(spec, DecentralizedIntegralSpec):
        measured = spec.signal_scale * omega + spec.biases
        return np.where(spec.mask, -measured / np.where(spec.mask, spec.gains, 1.0), 0.0)

    u = controller_output(spec, state) if u_current is None else as_vector(u_current, n, "u_current")
    true, reported = reported_marginals(spec, u)
    consensus = spec.W.sum(axis=1) * true - spec.W @ reported
    if spec.cheaters:
        consensus[list(spec.cheaters)] = 0.0
    controlled = spec.controlled
    safe_gains = np.where(controlled, spec.gains, 1.0)
    return np.where(controlled, -(spec.signal_scale * omega + consensus) / safe_gains, 0.0)
