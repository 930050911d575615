"""
Power Flow Kernels
Line-flow injections, the network potential U(θ), its Hessian and the
security-region check. All functions are pure in (net, theta).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from backend.frequency_control.network.model import NetworkModel

SECURITY_LIMIT = np.pi / 2


def _angle_differences(net: NetworkModel, theta: np.ndarray) -> np.ndarray:
    return theta[net.branch_from] - theta[net.branch_to]


def flow_injections(net: NetworkModel, theta: Sequence[float] | np.ndarray) -> np.ndarray:
    """f_i(θ) = Σ_j B_ij sin(θ_i − θ_j), i.e. the gradient of ``potential``."""
    theta = net.check_dimension(theta, "theta")
    flows = net.branch_b * np.sin(_angle_differences(net, theta))
    n = net.n_buses
    return np.bincount(net.branch_from, flows, n) - np.bincount(net.branch_to, flows, n)


def potential(net: NetworkModel, theta: Sequence[float] | np.ndarray) -> float:
    """U(θ) = Σ_{ij ∈ E} B_ij (1 − cos(θ_i − θ_j))."""
    theta = net.check_dimension(theta, "theta")
    return float(np.sum(net.branch_b * (1.0 - np.cos(_angle_differences(net, theta)))))


def hessian(net: NetworkModel, theta: Sequence[float] | np.ndarray) -> np.ndarray:
    """Weighted Laplacian with weights B_ij cos(θ_i − θ_j)."""
    theta = net.check_dimension(theta, "theta")
    weights = net.branch_b * np.cos(_angle_differences(net, theta))
    n = net.n_buses
    matrix = np.zeros((n, n))
    matrix[net.branch_from, net.branch_to] = -weights
    matrix[net.branch_to, net.branch_from] = -weights
    matrix[np.diag_indices(n)] = np.bincount(net.branch_from, weights, n) + np.bincount(net.branch_to, weights, n)
    return matrix


@dataclass(frozen=True)
class SecurityReport:
    secure: bool
    worst_branch: Optional[tuple[int, int]]
    worst_angle: float

    def describe(self, net: NetworkModel) -> str:
        if self.worst_branch is None:
            return "no branches"
        i, j = self.worst_branch
        state = "secure" if self.secure else "INSECURE"
        return f"{state}: worst branch {net.bus_ids[i]}-{net.bus_ids[j]} at {self.worst_angle:.6f} rad"


def check_security(net: NetworkModel, theta: Sequence[float] | np.ndarray) -> SecurityReport:
    """True iff |θ_i − θ_j| < π/2 on every branch; reports the widest branch."""
    theta = net.check_dimension(theta, "theta")
    if not net.branches:
        return SecurityReport(True, None, 0.0)
    spread = np.abs(_angle_differences(net, theta))
    worst = int(np.argmax(spread))
    branch = net.branches[worst]
    return SecurityReport(
        secure=bool(np.all(spread < SECURITY_LIMIT)),
        worst_branch=(branch.i, branch.j),
        worst_angle=float(spread[worst]),
    )
