# Costs package
# Response curves, the per-bus cost model and Luré-integral evaluations

from backend.frequency_control.costs.lure import bregman_lure, cost_value, dispatch_cost, lure_integral, unit_profit
from backend.frequency_control.costs.model import CostFamily, CostModel, inverse_marginal, marginal
from backend.frequency_control.costs.responses import LinearResponse, ResponseCurve, TanhResponse

__all__ = [
    "CostFamily",
    "CostModel",
    "LinearResponse",
    "ResponseCurve",
    "TanhResponse",
    "bregman_lure",
    "cost_value",
    "dispatch_cost",
    "inverse_marginal",
    "lure_integral",
    "marginal",
    "unit_profit",
]
