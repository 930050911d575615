"""
Simulation state and integrator configuration.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from backend.shared.utils.config import grid_setting
from backend.shared.utils.errors import GridLabError


@dataclass(frozen=True, eq=False)
class SystemState:
    """Full bus-level snapshot.

    ``omega`` holds the generator frequency states, the droop-bus rates θ̇ and
    the passive-bus rates (zero unless computed implicitly).
    """

    t: float
    theta: np.ndarray
    omega: np.ndarray
    ctrl: np.ndarray

    def replace(self, **changes) -> "SystemState":
        return dataclasses.replace(self, **changes)


def _default(name: str):
    return field(default_factory=lambda: grid_setting(name))


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = _default("GRID_LAB_DT")
    newton_tol: float = _default("GRID_LAB_NEWTON_TOL")
    newton_max_iter: int = _default("GRID_LAB_NEWTON_MAX_ITER")
    record_every: int = 1
    max_halvings: int = 5

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise GridLabError(f"dt must be positive, got {self.dt}")
        if not self.newton_tol > 0:
            raise GridLabError(f"newton_tol must be positive, got {self.newton_tol}")
        if int(self.newton_max_iter) < 1 or int(self.record_every) < 1:
            raise GridLabError("newton_max_iter and record_every must be at least 1")
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "newton_tol", float(self.newton_tol))
        object.__setattr__(self, "newton_max_iter", int(self.newton_max_iter))
        object.__setattr__(self, "record_every", int(self.record_every))
