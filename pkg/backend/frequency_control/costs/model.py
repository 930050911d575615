"""
Cost Model
Strictly convex per-bus cost functions built from one base response curve.

Every family stores weights w_i with (J_i')⁻¹(λ) = w_i·r(λ):
quadratic J_i(u) = ½A_i u² uses r(λ) = λ and w_i = 1/A_i, the scaled
family uses the cost weights C_i directly. A zero weight marks a
non-controlled bus (U_i = {0}).
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from backend.frequency_control.costs.responses import LinearResponse, ResponseCurve, TanhResponse
from backend.shared.utils.common import as_vector
from backend.shared.utils.errors import CostDomainError, DimensionError, GridLabError

logger = logging.getLogger(__name__)

# distance from a finite bound below which a bus counts as constrained
BOUND_TOL = 1e-12


class CostFamily(str, Enum):
    QUADRATIC = "quadratic"
    SCALED = "scaled"
    TANH = "tanh"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class CostModel:
    family: CostFamily
    base: ResponseCurve
    weights: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.weights)
        object.__setattr__(self, "family", CostFamily(self.family))
        object.__setattr__(self, "weights", _frozen(as_vector(self.weights, n, "weights")))
        object.__setattr__(self, "lower", _frozen(as_vector(self.lower, n, "lower")))
        object.__setattr__(self, "upper", _frozen(as_vector(self.upper, n, "upper")))
        if np.any(~np.isfinite(self.weights)) or np.any(self.weights < 0):
            raise GridLabError("cost weights must be finite and non-negative")
        for i in range(n):
            lo, hi = self.lower[i], self.upper[i]
            if self.weights[i] == 0:
                if lo != 0 or hi != 0:
                    raise GridLabError(f"non-controlled bus index {i} must have bounds [0, 0]")
            elif not (lo <= 0 <= hi and lo < hi):
                raise GridLabError(f"bus index {i} needs bounds lower <= 0 <= upper with lower < upper, got [{lo}, {hi}]")

    # -- construction -------------------------------------------------

    @classmethod
    def quadratic(
        cls,
        a: Sequence[Optional[float]],
        lower: Optional[Sequence[float]] = None,
        upper: Optional[Sequence[float]] = None,
    ) -> "CostModel":
        """J_i(u) = ½A_i u²; ``None`` or ``inf`` in ``a`` marks a non-controlled bus."""
        weights = []
        for i, value in enumerate(a):
            if value is None or math.isinf(value):
                weights.append(0.0)
            elif value > 0:
                weights.append(1.0 / float(value))
            else:
                raise GridLabError(f"quadratic coefficient A at bus index {i} must be positive, got {value}")
        weights_arr = np.array(weights)
        controlled = weights_arr > 0
        lo = np.full(len(weights), -np.inf) if lower is None else np.asarray(lower, dtype=float)
        hi = np.full(len(weights), np.inf) if upper is None else np.asarray(upper, dtype=float)
        lo = np.where(controlled, lo, 0.0)
        hi = np.where(controlled, hi, 0.0)
        return cls(CostFamily.QUADRATIC, LinearResponse(1.0), weights_arr, lo, hi)

    @classmethod
    def scaled(cls, weights: Sequence[float], base: Optional[ResponseCurve] = None) -> "CostModel":
        """Scaled family (J_i')⁻¹(λ) = C_i·r(λ); bounds follow the image of r."""
        base = base or LinearResponse(1.0)
        family = CostFamily.TANH if isinstance(base, TanhResponse) else CostFamily.SCALED
        weights_arr = np.asarray(weights, dtype=float)
        controlled = weights_arr > 0
        lower = np.where(controlled, weights_arr * base.lower, 0.0) if base.bounded else np.where(controlled, -np.inf, 0.0)
        upper = np.where(controlled, weights_arr * base.upper, 0.0) if base.bounded else np.where(controlled, np.inf, 0.0)
        return cls(family, base, weights_arr, lower, upper)

    @classmethod
    def tanh(cls, weights: Sequence[float], k1: float = 1.0, k2: int = 1) -> "CostModel":
        return cls.scaled(weights, TanhResponse(k1, k2))

    def with_base(self, base: ResponseCurve) -> "CostModel":
        """Same weights on a different base response (quadratic becomes scaled-linear)."""
        return CostModel.scaled(self.weights, base)

    # -- structure ----------------------------------------------------

    @property
    def n_buses(self) -> int:
        return len(self.weights)

    @property
    def controlled(self) -> np.ndarray:
        return self.weights > 0

    @property
    def controlled_idx(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    @property
    def open_bounds(self) -> bool:
        """Natural saturation bounds are never attained."""
        return self.family is CostFamily.TANH

    @property
    def has_active_box(self) -> bool:
        """Explicit finite bounds that can clip the scaled response."""
        return self.family is CostFamily.QUADRATIC and bool(
            np.any(np.isfinite(self.lower[self.controlled])) or np.any(np.isfinite(self.upper[self.controlled]))
        )

    def _check_bus(self, bus: int) -> int:
        if not 0 <= bus < self.n_buses:
            raise DimensionError(f"bus index {bus} outside 0..{self.n_buses - 1}")
        return int(bus)

    def is_interior(self, bus: int, u: float) -> bool:
        """Controlled bus with u strictly inside its bounds."""
        bus = self._check_bus(bus)
        if self.weights[bus] == 0:
            return False
        return self.lower[bus] + BOUND_TOL < u < self.upper[bus] - BOUND_TOL

    def unconstrained_mask(self, u: np.ndarray) -> np.ndarray:
        u = as_vector(u, self.n_buses, "u")
        return self.controlled & (u > self.lower + BOUND_TOL) & (u < self.upper - BOUND_TOL)

    # -- evaluations --------------------------------------------------

    def inverse_marginal_all(self, lam: float) -> np.ndarray:
        """Best response of every bus to the price λ, clamped to its bounds."""
        return np.clip(self.weights * self.base(lam), self.lower, self.upper)

    def inverse_marginal(self, bus: int, lam: float) -> float:
        bus = self._check_bus(bus)
        if self.weights[bus] == 0:
            return 0.0
        return float(np.clip(self.weights[bus] * self.base(lam), self.lower[bus], self.upper[bus]))

    def marginal(self, bus: int, u: float) -> float:
        bus = self._check_bus(bus)
        weight = self.weights[bus]
        if weight == 0:
            raise CostDomainError(f"bus index {bus} is not controlled; its marginal cost is undefined")
        lo, hi = self.lower[bus], self.upper[bus]
        inside = lo < u < hi if self.open_bounds else lo <= u <= hi
        if not (math.isfinite(u) and inside):
            raise CostDomainError(f"u={u} outside the domain of bus index {bus} ({lo}, {hi})")
        return float(self.base.inverse(u / weight))

    def marginal_all(self, u: np.ndarray, mask: Optional[np.ndarray] = None) -> np.ndarray:
        """Marginal costs on ``mask`` (default: controlled buses); NaN elsewhere."""
        u = as_vector(u, self.n_buses, "u")
        mask = self.controlled if mask is None else mask
        values = np.full(self.n_buses, np.nan)
        for i in np.flatnonzero(mask):
            values[i] = self.marginal(int(i), float(u[i]))
        return values

    def slope_bounds(self) -> np.ndarray:
        """Per-bus bounds on d(inverse_marginal_i)/dλ."""
        return self.weights * self.base.slope_bound()

    def clearing_residual(self, P: np.ndarray, lam: float) -> float:
        return float(np.sum(P + self.inverse_marginal_all(lam)))

    def replace(self, **changes) -> "CostModel":
        return dataclasses.replace(self, **changes)

    def same_as(self, other: "CostModel") -> bool:
        return (
            self.family is other.family
            and self.base == other.base
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
        )


def marginal(cost: CostModel, bus: int, u: float) -> float:
    """J_i'(u), the functional inverse of ``inverse_marginal``."""
    return cost.marginal(bus, u)


def inverse_marginal(cost: CostModel, bus: int, lam: float) -> float:
    """(J_i')⁻¹(λ) = w_i·r(λ), clamped to U_i."""
    return cost.inverse_marginal(bus, lam)
