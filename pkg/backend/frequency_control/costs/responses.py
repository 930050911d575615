"""
Response curves r(λ) = (J')⁻¹(λ) of the base cost profile.

A cost family is built from one response curve; every other quantity
(marginal cost, Luré integral, cost value) is derived from it.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
from scipy import optimize

from backend.shared.utils.errors import CostDomainError, GridLabError


class ResponseCurve(ABC):
    """Strictly increasing base response with r(0) = 0."""

    name: str = "response"
    #: image of r as an open (lower, upper) interval
    lower: float = -math.inf
    upper: float = math.inf

    @abstractmethod
    def __call__(self, lam):
        """Evaluate r(λ) for a scalar or array."""

    @abstractmethod
    def inverse(self, x: float) -> float:
        """Base marginal cost J'(x) = r⁻¹(x)."""

    def antiderivative(self, lam: float) -> Optional[float]:
        """Closed form of ∫₀^λ r, or ``None`` when quadrature is needed."""
        return None

    @abstractmethod
    def slope_bound(self) -> float:
        """Upper bound on sup_λ r'(λ)."""

    @abstractmethod
    def params(self) -> dict:
        """Parameters for serialization."""

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lower) or math.isfinite(self.upper)

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.params() == other.params()

    def __hash__(self) -> int:
        return hash((type(self).__name__, tuple(sorted(self.params().items()))))


class LinearResponse(ResponseCurve):
    """r(λ) = gain·λ, the response of the quadratic profile J(v) = v²/(2·gain)."""

    name = "linear"

    def __init__(self, gain: float = 1.0):
        if not (math.isfinite(gain) and gain > 0):
            raise GridLabError(f"linear response gain must be positive, got {gain}")
        self.gain = float(gain)

    def __call__(self, lam):
        return self.gain * lam

    def inverse(self, x: float) -> float:
        return x / self.gain

    def antiderivative(self, lam: float) -> float:
        return 0.5 * self.gain * lam * lam

    def slope_bound(self) -> float:
        return self.gain

    def params(self) -> dict:
        return {"gain": self.gain}

    def __repr__(self) -> str:
        return f"LinearResponse(gain={self.gain})"


def _log_cosh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - math.log(2.0)


class TanhResponse(ResponseCurve):
    """r(λ) = tanh(k1·sign(λ)|λ|^k2) with k2 a positive odd integer.

    k2 = 1 gives a smooth saturation; k2 ≥ 3 adds a smooth deadzone around 0.
    """

    name = "tanh"
    lower = -1.0
    upper = 1.0

    def __init__(self, k1: float = 1.0, k2: int = 1):
        if not (math.isfinite(k1) and k1 > 0):
            raise GridLabError(f"tanh response needs k1 > 0, got {k1}")
        if int(k2) != k2 or k2 < 1 or int(k2) % 2 == 0:
            raise GridLabError(f"tanh response needs k2 to be a positive odd integer, got {k2}")
        self.k1 = float(k1)
        self.k2 = int(k2)
        self._slope_bound: Optional[float] = None

    def _power(self, lam):
        if self.k2 == 1:
            return lam
        return np.sign(lam) * np.abs(lam) ** self.k2

    def __call__(self, lam):
        return np.tanh(self.k1 * self._power(lam))

    def inverse(self, x: float) -> float:
        if not -1.0 < x < 1.0:
            raise CostDomainError(f"tanh response inverse needs |x| < 1, got {x}")
        magnitude = (math.atanh(abs(x)) / self.k1) ** (1.0 / self.k2)
        return math.copysign(magnitude, x) if x != 0 else 0.0

    def antiderivative(self, lam: float) -> Optional[float]:
        if self.k2 == 1:
            return _log_cosh(self.k1 * lam) / self.k1
        return None

    def slope_bound(self) -> float:
        if self._slope_bound is None:
            if self.k2 == 1:
                self._slope_bound = self.k1
            else:
                # r'(λ) in terms of s = k1 λ^k2: k2 k1^(1/k2) s^((k2-1)/k2) sech²(s)
                exponent = (self.k2 - 1) / self.k2
                scale = self.k2 * self.k1 ** (1.0 / self.k2)

                def negative_slope(s: float) -> float:
                    return -scale * s**exponent / math.cosh(s) ** 2

                result = optimize.minimize_scalar(negative_slope, bounds=(0.0, 10.0), method="bounded")
                self._slope_bound = float(-result.fun) * 1.05
        return self._slope_bound

    def params(self) -> dict:
        return {"k1": self.k1, "k2": self.k2}

    def __repr__(self) -> str:
        return f"TanhResponse(k1={self.k1}, k2={self.k2})"
