"""
Frequency Metrics
Quality figures computed from a recorded trajectory.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from backend.frequency_control.analysis.diagnostics import marginal_cost_spread
from backend.frequency_control.analysis.trajectory import TrajectoryRecord
from backend.frequency_control.costs.model import CostModel
from backend.shared.utils.config import grid_setting
from backend.shared.utils.errors import GridLabError

STEADY_STATE_FRACTION = 0.05


@dataclass(frozen=True)
class FrequencyMetrics:
    nadir: float
    settling_time: Optional[float]
    steady_state_error: float
    threshold: float

    @property
    def settled(self) -> bool:
        return self.settling_time is not None

    def as_dict(self) -> dict:
        return asdict(self)


def _require_samples(traj: TrajectoryRecord) -> None:
    if traj.is_empty:
        raise GridLabError("trajectory has no samples")


def frequency_metrics(traj: TrajectoryRecord, threshold: Optional[float] = None) -> FrequencyMetrics:
    """Nadir, settling time and final-window frequency error.

    ``settling_time`` is the first sample time after which max_i |ω_i| stays
    below ``threshold``; None when the last sample is still above it.
    """
    _require_samples(traj)
    threshold = float(grid_setting("GRID_LAB_SETTLE_THRESHOLD") if threshold is None else threshold)
    deviation = np.max(np.abs(traj.omega), axis=1)
    above = np.flatnonzero(deviation >= threshold)
    if len(above) == 0:
        settling: Optional[float] = float(traj.t[0])
    elif above[-1] == len(traj) - 1:
        settling = None
    else:
        settling = float(traj.t[above[-1] + 1])
    tail = max(1, math.ceil(STEADY_STATE_FRACTION * len(traj)))
    return FrequencyMetrics(
        nadir=float(np.min(traj.omega)),
        settling_time=settling,
        steady_state_error=float(np.max(deviation[-tail:])),
        threshold=threshold,
    )


def control_effort(traj: TrajectoryRecord) -> float:
    """∫ Σ_i |u_i| dt by the trapezoidal rule."""
    _require_samples(traj)
    if len(traj) == 1:
        return 0.0
    return float(integrate.trapezoid(np.sum(np.abs(traj.u), axis=1), traj.t))


def spread_series(cost: CostModel, traj: TrajectoryRecord) -> np.ndarray:
    """Marginal-cost spread at every recorded sample."""
    return np.array([marginal_cost_spread(cost, row) for row in traj.u])


def window_max_deviation(traj: TrajectoryRecord, fraction: float) -> float:
    """Smallest max_i |ω_i| over the final ``fraction`` of the samples."""
    _require_samples(traj)
    start = int(math.floor((1.0 - fraction) * len(traj)))
    deviation = np.max(np.abs(traj.omega[start:]), axis=1)
    return float(np.min(deviation))


def integrator_separation(traj: TrajectoryRecord, mask: np.ndarray) -> np.ndarray:
    """max − min of the per-bus controller states on ``mask``, per sample."""
    _require_samples(traj)
    if traj.ctrl.shape[1] == 1:
        return np.zeros(len(traj))
    states = traj.ctrl[:, np.asarray(mask, dtype=bool)]
    return np.max(states, axis=1) - np.min(states, axis=1)
