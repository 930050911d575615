"""
KKT verification of a dispatch solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from backend.frequency_control.dispatch.market import DispatchSolution
from backend.frequency_control.dispatch.problem import DispatchProblem
from backend.shared.utils.common import as_vector
from backend.shared.utils.errors import CostDomainError


@dataclass(frozen=True)
class KKTReport:
    stationarity: float
    primal: float
    bounds_violation: float
    passed: bool
    tol: float

    def as_dict(self) -> dict:
        return {
            "kkt_stationarity": self.stationarity,
            "kkt_primal": self.primal,
            "kkt_bounds_violation": self.bounds_violation,
            "kkt_passed": self.passed,
            "kkt_tol": self.tol,
        }


def verify_kkt(prob: DispatchProblem, sol: DispatchSolution, tol: float = 1e-7) -> KKTReport:
    """Check stationarity on unconstrained buses, power balance and bound satisfaction."""
    costs = prob.costs
    u = as_vector(sol.u_star, costs.n_buses, "u_star")
    lam = float(sol.lambda_star)

    stationarity = 0.0
    for i in np.flatnonzero(costs.unconstrained_mask(u)):
        try:
            gap = abs(costs.marginal(int(i), float(u[i])) - lam)
        except CostDomainError:
            gap = np.inf
        stationarity = max(stationarity, gap)

    primal = abs(float(np.sum(prob.P + u)))
    below = np.maximum(costs.lower - u, 0.0)
    above = np.maximum(u - costs.upper, 0.0)
    bounds_violation = float(np.max(np.concatenate([below, above]))) if costs.n_buses else 0.0
    passed = bool(stationarity <= tol and primal <= tol and bounds_violation <= tol)
    return KKTReport(stationarity=float(stationarity), primal=primal, bounds_violation=bounds_violation, passed=passed, tol=tol)
