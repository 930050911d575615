# Analysis package
# Trajectory container, Lyapunov diagnostics and frequency-quality metrics

from backend.frequency_control.analysis.diagnostics import (
    dissipation,
    hamiltonian,
    hamiltonian_rate,
    hamiltonian_supported,
    marginal_cost_spread,
    sync_frequency,
)
from backend.frequency_control.analysis.metrics import (
    FrequencyMetrics,
    control_effort,
    frequency_metrics,
    integrator_separation,
    spread_series,
    window_max_deviation,
)
from backend.frequency_control.analysis.trajectory import TrajectoryRecord, TrajectoryRecorder

__all__ = [
    "FrequencyMetrics",
    "TrajectoryRecord",
    "TrajectoryRecorder",
    "control_effort",
    "dissipation",
    "frequency_metrics",
    "hamiltonian",
    "hamiltonian_rate",
    "hamiltonian_supported",
    "integrator_separation",
    "marginal_cost_spread",
    "spread_series",
    "sync_frequency",
    "window_max_deviation",
]
