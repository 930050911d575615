"""
Recognize classical controllers hidden in a gather-and-broadcast parameterization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from backend.frequency_control.controllers.specs import ControllerSpec, GatherBroadcastSpec
from backend.frequency_control.costs.model import CostFamily
from backend.frequency_control.costs.responses import LinearResponse
from backend.frequency_control.network.model import NetworkModel
from backend.shared.utils.errors import GridLabError

MATCH_TOL = 1e-12


@dataclass(frozen=True)
class ReductionReport:
    kind: str  # "agc", "mean_field", "all_to_all" or "none"
    bus: Optional[int] = None
    label: str = "none"


def reduction_check(spec: ControllerSpec, net: Optional[NetworkModel] = None) -> ReductionReport:
    """Name the special case a gather-and-broadcast spec reduces to, if any."""
    if not isinstance(spec, GatherBroadcastSpec):
        raise GridLabError("reduction_check applies to gather-and-broadcast specs only")
    weights = spec.weights
    n = len(weights)

    support = np.flatnonzero(weights > 0)
    linear = spec.cost.family is CostFamily.QUADRATIC or isinstance(spec.cost.base, LinearResponse)
    if len(support) == 1 and linear:
        bus = int(support[0])
        label = net.bus_ids[bus] if net is not None else bus
        return ReductionReport("agc", bus, f"AGC at bus {label}")

    if n > 1 and np.all(np.abs(weights - 1.0 / n) <= MATCH_TOL):
        return ReductionReport("mean_field", None, "mean-field")

    if net is not None and net.D.sum() > 0:
        damping_share = net.D / net.D.sum()
        if np.all(np.abs(weights - damping_share) <= MATCH_TOL):
            return ReductionReport("all_to_all", None, "all-to-all")

    return ReductionReport("none", None, "none")
