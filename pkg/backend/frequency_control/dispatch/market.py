"""
Market Clearing
Scalar root-finding for the clearing price λ* with Σ (P_i + (J_i')⁻¹(λ*)) = 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from scipy import optimize

from backend.frequency_control.dispatch.problem import DispatchProblem, require_feasible
from backend.shared.utils.errors import NonConvergenceError, RootBracketError

logger = logging.getLogger(__name__)

MAX_BRACKET_EXPANSIONS = 60
LAMBDA_XTOL = 1e-14


@dataclass(frozen=True, eq=False)
class DispatchSolution:
    u_star: np.ndarray
    lambda_star: float
    iterations: int
    residual: float
    history: Optional[pd.DataFrame] = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {
            "lambda_star": self.lambda_star,
            "u_star": self.u_star.tolist(),
            "iterations": self.iterations,
            "residual": self.residual,
        }


def _bracket(prob: DispatchProblem) -> tuple[float, float, float, float]:
    def g(lam: float) -> float:
        return prob.costs.clearing_residual(prob.P, lam)

    lo, hi = -1.0, 1.0
    g_lo, g_hi = g(lo), g(hi)
    expansions = 0
    while g_lo > 0 or g_hi < 0:
        if expansions >= MAX_BRACKET_EXPANSIONS:
            raise RootBracketError(
                f"clearing price not bracketed after {expansions} expansions (interval [{lo:.3g}, {hi:.3g}], "
                f"residuals {g_lo:.3g}, {g_hi:.3g})"
            )
        if g_lo > 0:
            lo *= 2.0
            g_lo = g(lo)
        if g_hi < 0:
            hi *= 2.0
            g_hi = g(hi)
        expansions += 1
    logger.debug("clearing price bracketed in [%g, %g] after %d expansions", lo, hi, expansions)
    return lo, hi, g_lo, g_hi


def solve_market_clearing(prob: DispatchProblem, tol: float = 1e-10) -> DispatchSolution:
    """Clearing price by bracketing plus Brent's method; ``iterations`` is 0 on this path."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    require_feasible(prob)
    costs = prob.costs

    if costs.clearing_residual(prob.P, 0.0) == 0.0:
        lam_star = 0.0
    else:
        lo, hi, g_lo, g_hi = _bracket(prob)
        if g_lo == 0.0:
            lam_star = lo
        elif g_hi == 0.0:
            lam_star = hi
        else:
            lam_star = optimize.brentq(
                lambda lam: costs.clearing_residual(prob.P, lam), lo, hi, xtol=LAMBDA_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500
            )

    u_star = costs.inverse_marginal_all(lam_star)
    residual = abs(float(np.sum(prob.P + u_star)))
    if residual > tol:
        # flat clearing maps can leave a residual after λ converged; polish with bisection on the residual itself
        lam_star, u_star, residual = _polish(prob, lam_star, tol)
    logger.info("market clearing price %.12g (residual %.3e)", lam_star, residual)
    return DispatchSolution(u_star=u_star, lambda_star=float(lam_star), iterations=0, residual=residual)


def _polish(prob: DispatchProblem, lam: float, tol: float) -> tuple[float, np.ndarray, float]:
    costs = prob.costs
    lo, hi = lam - 1e-6 * max(1.0, abs(lam)), lam + 1e-6 * max(1.0, abs(lam))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g = costs.clearing_residual(prob.P, mid)
        if abs(g) <= tol:
            u = costs.inverse_marginal_all(mid)
            return mid, u, abs(float(np.sum(prob.P + u)))
        if g > 0:
            hi = mid
        else:
            lo = mid
    g = costs.clearing_residual(prob.P, lam)
    raise NonConvergenceError(f"clearing residual {abs(g):.3e} above tolerance {tol:.1e}", last_residual=abs(g), iterations=200)
