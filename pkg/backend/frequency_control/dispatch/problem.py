"""
Dispatch Problem
Economic-dispatch instance: minimize Σ J_i(u_i) s.t. Σ (P_i + u_i) = 0, u_i ∈ U_i.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from backend.frequency_control.costs.model import CostModel
from backend.shared.utils.common import as_vector
from backend.shared.utils.errors import InfeasibleDispatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DispatchProblem:
    costs: CostModel
    P: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "P", as_vector(self.P, self.costs.n_buses, "P"))

    @property
    def n_buses(self) -> int:
        return self.costs.n_buses

    @property
    def demand(self) -> float:
        """Net load −Σ P_i that the controllable injections must cover."""
        return float(-np.sum(self.P))


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    demand: float
    lower_sum: float
    upper_sum: float
    margin_lower: float
    margin_upper: float
    violated_side: Optional[str] = None

    def describe(self) -> str:
        if self.feasible:
            return (
                f"feasible: demand {self.demand:.6g} within [{self.lower_sum:.6g}, {self.upper_sum:.6g}] "
                f"(margins {self.margin_lower:.6g} above lower sum, {self.margin_upper:.6g} below upper sum)"
            )
        return (
            f"infeasible: demand {self.demand:.6g} outside [{self.lower_sum:.6g}, {self.upper_sum:.6g}] "
            f"({self.violated_side} bound sum violated)"
        )


def check_feasibility(prob: DispatchProblem) -> FeasibilityReport:
    """Supply-demand feasibility: −Σ P_i ∈ Σ U_i."""
    demand = prob.demand
    lower_sum = float(np.sum(prob.costs.lower))
    upper_sum = float(np.sum(prob.costs.upper))
    margin_lower = demand - lower_sum
    margin_upper = upper_sum - demand
    if prob.costs.open_bounds:
        # saturating responses never reach their bounds; zero demand is still met with u = 0
        ok_lower = margin_lower > 0 or demand == 0
        ok_upper = margin_upper > 0 or demand == 0
    else:
        ok_lower = margin_lower >= 0
        ok_upper = margin_upper >= 0
    violated = None if ok_lower and ok_upper else ("lower" if not ok_lower else "upper")
    return FeasibilityReport(
        feasible=violated is None,
        demand=demand,
        lower_sum=lower_sum,
        upper_sum=upper_sum,
        margin_lower=margin_lower if math.isfinite(margin_lower) else math.inf,
        margin_upper=margin_upper if math.isfinite(margin_upper) else math.inf,
        violated_side=violated,
    )


def require_feasible(prob: DispatchProblem) -> FeasibilityReport:
    report = check_feasibility(prob)
    if not report.feasible:
        raise InfeasibleDispatchError(f"supply-demand feasibility violated: {report.describe()}")
    logger.debug("dispatch %s", report.describe())
    return report
