# Controllers package
# Specs, control laws and reduction checks for the secondary-control variants

from backend.frequency_control.controllers.laws import (
    controller_output,
    controller_rhs,
    initial_state,
    n_buses_of,
    reported_marginals,
)
from backend.frequency_control.controllers.reduction import ReductionReport, reduction_check
from backend.frequency_control.controllers.specs import (
    FREQUENCY_SIGNAL_SCALES,
    AGCSpec,
    ControllerSpec,
    ControllerVariant,
    DAISpec,
    DecentralizedIntegralSpec,
    GatherBroadcastSpec,
    PassiveMode,
    circulant_weights,
    network_weights,
)

__all__ = [
    "AGCSpec",
    "ControllerSpec",
    "ControllerVariant",
    "DAISpec",
    "DecentralizedIntegralSpec",
    "FREQUENCY_SIGNAL_SCALES",
    "GatherBroadcastSpec",
    "PassiveMode",
    "ReductionReport",
    "circulant_weights",
    "controller_output",
    "controller_rhs",
    "initial_state",
    "n_buses_of",
    "network_weights",
    "reduction_check",
    "reported_marginals",
]
