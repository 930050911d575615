"""
Dual Decomposition
Price-broadcast auction: every unit best-responds to λ(k), the coordinator
moves the price against the power imbalance.

    u_i(k+1) = argmin_{υ ∈ U_i} J_i(υ) − λ(k)·υ
    λ(k+1)   = λ(k) − α Σ_i (P_i + u_i(k+1))

The imbalance of each iterate also fixes the frequency the grid would settle
at under that dispatch, ω(k) = Σ(P + u(k)) / D_total.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np
import pandas as pd

from backend.frequency_control.dispatch.market import DispatchSolution
from backend.frequency_control.dispatch.problem import DispatchProblem, require_feasible
from backend.shared.utils.errors import NonConvergenceError

logger = logging.getLogger(__name__)

DIVERGENCE_WINDOW = 50
HISTORY_COLUMNS = ["k", "lambda", "residual", "omega"]


def default_step_size(prob: DispatchProblem) -> float:
    """α = 0.5 / Σ s_i with s_i bounding the slope of each inverse marginal."""
    total = float(np.sum(prob.costs.slope_bounds()))
    if total <= 0:
        raise ValueError("no controlled bus: the dual iteration has no step size")
    return 0.5 / total


def dual_decomposition(
    prob: DispatchProblem,
    alpha: Optional[float] = None,
    d_total: float = 1.0,
    max_iter: int = 200_000,
    tol: float = 1e-10,
    lambda0: float = 0.0,
    window: int = DIVERGENCE_WINDOW,
) -> DispatchSolution:
    """Run the dual iteration from ``lambda0`` until |Σ(P + u)| ≤ ``tol``.

    Row k of the returned history holds the broadcast price λ(k), the residual
    Σ(P + u(k+1)) of the response to it and ω(k+1). ``iterations`` counts rows.

    Raises:
        NonConvergenceError: the residual stopped shrinking over ``window``
            iterations or ``max_iter`` was reached.
    """
    alpha = default_step_size(prob) if alpha is None else float(alpha)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not d_total > 0:
        raise ValueError("d_total must be positive")
    require_feasible(prob)

    costs, P = prob.costs, prob.P
    lam = float(lambda0)
    rows: list[tuple[int, float, float, float]] = []
    magnitudes: list[float] = []
    for k in range(max_iter):
        u = costs.inverse_marginal_all(lam)
        residual = float(np.sum(P + u))
        rows.append((k, lam, residual, residual / d_total))
        magnitude = abs(residual)
        magnitudes.append(magnitude)
        if not math.isfinite(residual):
            raise NonConvergenceError(f"dual iteration produced a non-finite residual at k={k}", last_residual=magnitude, iterations=k + 1)
        if magnitude <= tol:
            history = pd.DataFrame(rows, columns=HISTORY_COLUMNS)
            logger.info("dual decomposition converged to λ=%.12g in %d iterations (α=%.4g)", lam, k + 1, alpha)
            return DispatchSolution(u_star=u, lambda_star=lam, iterations=k + 1, residual=magnitude, history=history)
        if k >= window and magnitude >= magnitudes[k - window]:
            raise NonConvergenceError(
                f"dual iteration residual did not decrease over {window} iterations (|r|={magnitude:.3e} at k={k}); "
                f"step size α={alpha:.4g} is too large",
                last_residual=magnitude,
                iterations=k + 1,
            )
        lam = lam - alpha * residual
    raise NonConvergenceError(
        f"dual iteration did not reach tol {tol:.1e} within {max_iter} iterations (|r|={magnitudes[-1]:.3e})",
        last_residual=magnitudes[-1],
        iterations=max_iter,
    )


def export_history(solution: DispatchSolution, path: str) -> None:
    """Write the iterate history as CSV with full double precision."""
    if solution.history is None:
        raise ValueError("solution has no iterate history")
    solution.history.to_csv(path, index=False, float_format="%.17g")
