"""
Equilibrium Task
Finds the optimal synchronous equilibrium of a case and checks its security.
"""

from backend.frequency_control.dynamics.equilibrium import find_equilibrium
from backend.frequency_control.harness.cases import load_case
from backend.shared.utils.common import domain_error_payload, error_payload, require, success_payload, to_builtin


def run(params: dict, file_bytes: bytes | None = None) -> tuple[dict, int]:
    """
    Compute the equilibrium of a case at its nominal injections.

    Args:
        params: Dictionary containing case
        file_bytes: Optional file data (not used in this task)

    Returns:
        Tuple of (response_dict, status_code)
    """
    service, subtask = "grid", "equilibrium"

    try:
        require(params, ["case"])
        bundle = load_case(params["case"])
        net = bundle.network
        eq = find_equilibrium(net, bundle.cost)

        data = eq.as_dict(net)
        data["case"] = bundle.name
        data["bus_ids"] = list(net.bus_ids)

        insights = [f"Power flow converged in {eq.iterations} Newton iterations (residual {eq.residual:.2e})"]
        insights.append("Equilibrium lies inside the security region" if eq.security.secure else "Equilibrium is insecure")
        insights.extend(eq.warnings)
        return success_payload(service, subtask, params, to_builtin(data), insights), 200

    except ValueError as e:
        return domain_error_payload(service, subtask, e)
    except Exception as e:
        return error_payload(service, subtask, f"Internal error: {str(e)}", 500)
