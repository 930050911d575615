# Network package
# Bus roles, branch data and the power-flow kernels

from backend.frequency_control.network.flows import (
    SecurityReport,
    check_security,
    flow_injections,
    hessian,
    potential,
)
from backend.frequency_control.network.model import Branch, BusKind, NetworkModel

__all__ = [
    "Branch",
    "BusKind",
    "NetworkModel",
    "SecurityReport",
    "check_security",
    "flow_injections",
    "hessian",
    "potential",
]
