"""
Luré integral, its Bregman distance and cost values derived from it.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from backend.frequency_control.costs.model import CostModel
from backend.shared.utils.common import as_vector
from backend.shared.utils.errors import CostDomainError

logger = logging.getLogger(__name__)

QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-12


def _quad(func: Callable[[float], float], a: float, b: float) -> float:
    value, error = integrate.quad(func, a, b, epsabs=QUAD_ABS_TOL, epsrel=QUAD_REL_TOL, limit=200)
    if error > 10 * QUAD_ABS_TOL + QUAD_REL_TOL * abs(value):
        logger.debug("quadrature error estimate %.3e on [%g, %g]", error, a, b)
    return float(value)


def _base_integral(cost: CostModel, lam: float, lam0: float) -> float:
    if lam == lam0:
        return 0.0
    upper = cost.base.antiderivative(lam)
    lower = cost.base.antiderivative(lam0)
    if upper is not None and lower is not None:
        return upper - lower
    return _quad(lambda xi: float(cost.base(xi)), lam0, lam)


def lure_integral(cost: CostModel, lam: float, lam0: float, bus: Optional[int] = None) -> float:
    """I(λ) = ∫_{λ0}^{λ} (J')⁻¹(ξ) dξ.

    Without ``bus`` the integrand is the base response r; with ``bus`` it is
    the per-bus inverse marginal (J_i')⁻¹.
    """
    lam, lam0 = float(lam), float(lam0)
    if bus is None:
        return _base_integral(cost, lam, lam0)
    if cost.weights[bus] == 0 or lam == lam0:
        return 0.0
    if cost.has_active_box:
        return _quad(lambda xi: cost.inverse_marginal(bus, xi), lam0, lam)
    return float(cost.weights[bus]) * _base_integral(cost, lam, lam0)


def bregman_lure(cost: CostModel, lam: float, lam_star: float, bus: Optional[int] = None) -> float:
    """I(λ) − I(λ*) − I'(λ*)(λ − λ*), non-negative and zero only at λ*."""
    lam, lam_star = float(lam), float(lam_star)
    if lam == lam_star:
        return 0.0
    slope = float(cost.base(lam_star)) if bus is None else cost.inverse_marginal(bus, lam_star)
    linear = slope * (lam - lam_star)
    value = lure_integral(cost, lam, lam_star, bus) - linear
    if value < -(10 * QUAD_ABS_TOL + QUAD_REL_TOL * abs(linear)):
        raise CostDomainError(
            f"negative Bregman distance {value:.3e} between lambda={lam:.6g} and {lam_star:.6g}; "
            "the response and its integral disagree"
        )
    return max(value, 0.0)


def cost_value(cost: CostModel, bus: int, u: float) -> float:
    """J_i(u) normalized to J_i(0) = 0, via J_i(u) = u·λ − ∫₀^λ (J_i')⁻¹ with λ = J_i'(u)."""
    if cost.weights[bus] == 0:
        return 0.0 if u == 0 else math.inf
    if u == 0:
        return 0.0
    lam = cost.marginal(bus, u)
    return float(u * lam - lure_integral(cost, lam, 0.0, bus))


def dispatch_cost(cost: CostModel, u: np.ndarray) -> float:
    """Aggregate operating cost Σ_i J_i(u_i)."""
    u = as_vector(u, cost.n_buses, "u")
    return float(sum(cost_value(cost, i, float(u[i])) for i in range(cost.n_buses)))


def unit_profit(cost: CostModel, bus: int, u: float, price: float) -> float:
    """Profit λ·u − J_i(u) of a unit paid ``price`` for its injection."""
    return float(price * u - cost_value(cost, bus, u))
