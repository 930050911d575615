"""
Trajectory Record
Sampled closed-loop trajectory and its tabular (CSV) form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd

from backend.shared.utils.errors import DimensionError, GridLabError


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """Samples stacked row-wise: ``theta[s]`` is the angle vector at ``t[s]``.

    ``ctrl`` has one column for scalar-price controllers and one per bus
    otherwise. ``H`` is None when the Hamiltonian is not available for the run.
    """

    t: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    ctrl: np.ndarray
    u: np.ndarray
    H: Optional[np.ndarray] = None
    bus_ids: Sequence[int] = ()
    scenario_id: str = ""
    variant: str = ""

    def __post_init__(self) -> None:
        n_samples = len(self.t)
        if n_samples and np.any(np.diff(self.t) <= 0):
            raise GridLabError("trajectory sample times must be strictly increasing")
        for name in ("theta", "omega", "ctrl", "u"):
            array = getattr(self, name)
            if array.ndim != 2 or array.shape[0] != n_samples:
                raise DimensionError(f"{name} must have one row per sample ({n_samples}), got shape {array.shape}")
        if self.theta.shape != self.omega.shape or self.theta.shape != self.u.shape:
            raise DimensionError("theta, omega and u must share one shape")
        if self.H is not None and self.H.shape != (n_samples,):
            raise DimensionError(f"H must have shape ({n_samples},), got {self.H.shape}")
        if not self.bus_ids:
            object.__setattr__(self, "bus_ids", tuple(range(1, self.n_buses + 1)))

    def __len__(self) -> int:
        return len(self.t)

    @property
    def n_buses(self) -> int:
        return self.theta.shape[1]

    @property
    def is_empty(self) -> bool:
        return len(self.t) == 0

    @property
    def final_u(self) -> np.ndarray:
        return self.u[-1]

    @property
    def final_ctrl(self) -> np.ndarray:
        return self.ctrl[-1]

    def columns(self) -> list[str]:
        ids = list(self.bus_ids)
        ctrl_cols = ["lambda"] if self.ctrl.shape[1] == 1 else [f"lambda_{i}" for i in ids]
        return (
            ["t"]
            + [f"theta_{i}" for i in ids]
            + [f"omega_{i}" for i in ids]
            + ctrl_cols
            + [f"u_{i}" for i in ids]
            + ["H"]
        )

    def to_frame(self) -> pd.DataFrame:
        H = np.full(len(self.t), np.nan) if self.H is None else self.H
        data = np.column_stack([self.t, self.theta, self.omega, self.ctrl, self.u, H])
        return pd.DataFrame(data, columns=self.columns())


@dataclass
class TrajectoryRecorder:
    """Accumulates samples during integration; ``hamiltonian`` maps (theta, omega, ctrl) to H."""

    n_buses: int
    bus_ids: Sequence[int] = ()
    scenario_id: str = ""
    variant: str = ""
    hamiltonian: Optional[Callable[[np.ndarray, np.ndarray, np.ndarray], float]] = None
    _rows: list = field(default_factory=list, repr=False)

    def record(self, t: float, theta: np.ndarray, omega: np.ndarray, ctrl: np.ndarray, u: np.ndarray) -> None:
        if self._rows and t <= self._rows[-1][0]:
            return
        H = self.hamiltonian(theta, omega, ctrl) if self.hamiltonian is not None else None
        self._rows.append((float(t), theta.copy(), omega.copy(), np.array(ctrl, dtype=float), u.copy(), H))

    def build(self) -> TrajectoryRecord:
        n = self.n_buses
        if not self._rows:
            empty = np.empty((0, n))
            return TrajectoryRecord(
                np.empty(0), empty, empty, np.empty((0, 1)), empty, None, tuple(self.bus_ids), self.scenario_id, self.variant
            )
        t, theta, omega, ctrl, u, H = zip(*self._rows)
        return TrajectoryRecord(
            t=np.array(t),
            theta=np.vstack(theta),
            omega=np.vstack(omega),
            ctrl=np.vstack(ctrl),
            u=np.vstack(u),
            H=None if self.hamiltonian is None else np.array(H, dtype=float),
            bus_ids=tuple(self.bus_ids),
            scenario_id=self.scenario_id,
            variant=self.variant,
        )
