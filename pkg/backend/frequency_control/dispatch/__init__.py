# Dispatch package
# Feasibility, market clearing, dual decomposition and KKT checks

from backend.frequency_control.dispatch.dual import default_step_size, dual_decomposition, export_history
from backend.frequency_control.dispatch.kkt import KKTReport, verify_kkt
from backend.frequency_control.dispatch.market import DispatchSolution, solve_market_clearing
from backend.frequency_control.dispatch.problem import (
    DispatchProblem,
    FeasibilityReport,
    check_feasibility,
    require_feasible,
)

__all__ = [
    "DispatchProblem",
    "DispatchSolution",
    "FeasibilityReport",
    "KKTReport",
    "check_feasibility",
    "default_step_size",
    "dual_decomposition",
    "export_history",
    "require_feasible",
    "solve_market_clearing",
    "verify_kkt",
]
