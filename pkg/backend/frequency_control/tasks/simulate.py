"""
Simulate Task
Runs one scenario and reports its summary and output files.
"""

from backend.frequency_control.harness.runner import run_scenario
from backend.frequency_control.harness.scenarios import load_scenario
from backend.shared.utils.common import domain_error_payload, error_payload, require, success_payload, to_builtin

OVERRIDES = ("seed", "dt", "horizon", "out")


def run(params: dict, file_bytes: bytes | None = None) -> tuple[dict, int]:
    """
    Simulate a scenario file or bundled scenario.

    Args:
        params: Dictionary containing scenario and optional seed, dt, horizon, out, write_outputs
        file_bytes: Optional file data (not used in this task)

    Returns:
        Tuple of (response_dict, status_code)
    """
    service, subtask = "grid", "simulate"

    try:
        require(params, ["scenario"])
        overrides = {key: params.get(key) for key in OVERRIDES}
        scenario = load_scenario(params["scenario"], overrides)
        result = run_scenario(scenario, write_outputs=bool(params.get("write_outputs", True)))

        insights = []
        if result.metrics.settled:
            insights.append(f"Frequencies settled below {result.metrics.threshold:g} rad/s after {result.metrics.settling_time:.3f} s")
        else:
            insights.append(f"Frequencies did not settle below {result.metrics.threshold:g} rad/s within {scenario.horizon:g} s")
        if result.kkt is not None:
            verdict = "satisfies" if result.kkt.passed else "does not satisfy"
            insights.append(f"Final dispatch {verdict} the optimality conditions at tol {result.kkt.tol:g}")

        data = {
            "summary": to_builtin(result.summary),
            "outputs": {name: str(path) for name, path in result.outputs.items()},
        }
        return success_payload(service, subtask, params, data, insights), 200

    except ValueError as e:
        return domain_error_payload(service, subtask, e)
    except Exception as e:
        return error_payload(service, subtask, f"Internal error: {str(e)}", 500)
