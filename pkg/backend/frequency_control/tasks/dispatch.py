"""
Dispatch Task
Solves the optimal dispatch of a case by market clearing or dual decomposition.
"""

from backend.frequency_control.dispatch.dual import dual_decomposition, export_history
from backend.frequency_control.dispatch.kkt import verify_kkt
from backend.frequency_control.dispatch.market import solve_market_clearing
from backend.frequency_control.dispatch.problem import DispatchProblem, check_feasibility
from backend.frequency_control.harness.cases import load_case
from backend.shared.utils.common import (
    domain_error_payload,
    error_payload,
    require,
    safe_float,
    success_payload,
    to_builtin,
    validate_positive_numbers,
)

DEFAULT_TOL = 1e-10


def run(params: dict, file_bytes: bytes | None = None) -> tuple[dict, int]:
    """
    Solve the economic dispatch of a case.

    Args:
        params: Dictionary containing case and optional dual, alpha, tol, max_iter, lambda0, history_csv
        file_bytes: Optional file data (not used in this task)

    Returns:
        Tuple of (response_dict, status_code)
    """
    service, subtask = "grid", "dispatch"

    try:
        require(params, ["case"])
        validate_positive_numbers(params, ["alpha", "tol", "max_iter"])
        tol = safe_float(params.get("tol") or DEFAULT_TOL, "tol")
        bundle = load_case(params["case"])
        net = bundle.network
        problem = DispatchProblem(bundle.cost, net.P)
        feasibility = check_feasibility(problem)

        market = solve_market_clearing(problem, tol)
        solution, method = market, "market_clearing"
        if params.get("dual"):
            alpha = params.get("alpha")
            solution = dual_decomposition(
                problem,
                alpha=None if alpha is None else safe_float(alpha, "alpha"),
                d_total=net.total_damping,
                max_iter=int(params.get("max_iter") or 200_000),
                tol=tol,
                lambda0=safe_float(params.get("lambda0") or 0.0, "lambda0"),
            )
            method = "dual_decomposition"
            if params.get("history_csv"):
                export_history(solution, params["history_csv"])

        kkt = verify_kkt(problem, solution, max(tol, 1e-9) * 10)
        data = {
            "case": bundle.name,
            "method": method,
            "lambda_star": solution.lambda_star,
            "u_star": {str(bus_id): float(u) for bus_id, u in zip(net.bus_ids, solution.u_star)},
            "iterations": solution.iterations,
            "residual": solution.residual,
            "feasibility": feasibility.describe(),
            "kkt": kkt.as_dict(),
        }
        if method == "dual_decomposition":
            data["lambda_gap"] = abs(solution.lambda_star - market.lambda_star)
            if params.get("history_csv"):
                data["history_csv"] = str(params["history_csv"])

        insights = [f"Clearing price λ* = {solution.lambda_star:.6g} serves demand {problem.demand:.6g} pu"]
        if method == "dual_decomposition":
            insights.append(f"Dual iteration matched market clearing to {data['lambda_gap']:.2e} after {solution.iterations} iterations")
        if not kkt.passed:
            insights.append("Optimality conditions are not met within tolerance")
        return success_payload(service, subtask, params, to_builtin(data), insights), 200

    except ValueError as e:
        return domain_error_payload(service, subtask, e)
    except Exception as e:
        return error_payload(service, subtask, f"Internal error: {str(e)}", 500)
