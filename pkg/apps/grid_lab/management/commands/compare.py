from apps.grid_lab.management.commands._base import GridTaskCommand, add_scenario_overrides


class Command(GridTaskCommand):
    help = "Run one scenario under several controllers and print a comparison table"
    subtask = "compare"
    param_names = ("scenario", "controllers", "workers", "seed", "dt", "horizon", "out")

    def add_arguments(self, parser):
        parser.add_argument("scenario", help="Scenario JSON path or bundled scenario name")
        parser.add_argument(
            "--controllers",
            nargs="+",
            required=True,
            help="Controller presets (gather_broadcast, gather_broadcast_tanh, gather_broadcast_tanh3, "
            "decentralized_integral, agc, dai) or JSON files with controller sections",
        )
        parser.add_argument("--workers", type=int, help="Variants run concurrently")
        add_scenario_overrides(parser)
        super().add_arguments(parser)

    def render(self, payload: dict) -> str:
        return payload["data"]["table_text"]
