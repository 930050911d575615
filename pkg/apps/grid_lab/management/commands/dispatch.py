from apps.grid_lab.management.commands._base import GridTaskCommand


class Command(GridTaskCommand):
    help = "Solve the economic dispatch of a case by market clearing or dual decomposition"
    subtask = "dispatch"
    param_names = ("case", "dual", "alpha", "tol", "max_iter", "lambda0", "history_csv")

    def add_arguments(self, parser):
        parser.add_argument("case", help="Case JSON path or bundled case name")
        parser.add_argument("--dual", action="store_true", help="Use the dual decomposition iteration")
        parser.add_argument("--alpha", type=float, help="Dual step size (default 0.5 / sum of slope bounds)")
        parser.add_argument("--tol", type=float, help="Tolerance on the power imbalance")
        parser.add_argument("--max-iter", dest="max_iter", type=int, help="Dual iteration limit")
        parser.add_argument("--lambda0", type=float, help="Initial dual price")
        parser.add_argument("--history-csv", dest="history_csv", help="Write the dual iterate history to this CSV")
        super().add_arguments(parser)

    def params_from(self, options: dict) -> dict:
        params = super().params_from(options)
        if not options.get("dual"):
            params.pop("dual", None)
        return params

    def render(self, payload: dict) -> str:
        data = payload["data"]
        lines = [
            f"case = {data['case']}",
            f"method = {data['method']}",
            f"lambda_star = {data['lambda_star']!r}",
            f"iterations = {data['iterations']}",
            f"residual = {data['residual']!r}",
        ]
        if "lambda_gap" in data:
            lines.append(f"lambda_gap = {data['lambda_gap']!r}")
        lines.extend(f"u_{bus_id} = {value!r}" for bus_id, value in data["u_star"].items())
        lines.extend(f"{key} = {value}" for key, value in sorted(data["kkt"].items()))
        return "\n".join(lines)
