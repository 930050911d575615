from apps.grid_lab.management.commands._base import GridTaskCommand, add_scenario_overrides
from backend.frequency_control.harness.persistence import format_summary


class Command(GridTaskCommand):
    help = "Simulate a scenario file or bundled scenario and write its trajectory and summary"
    subtask = "simulate"
    param_names = ("scenario", "seed", "dt", "horizon", "out")

    def add_arguments(self, parser):
        parser.add_argument("scenario", help="Scenario JSON path or bundled scenario name")
        add_scenario_overrides(parser)
        super().add_arguments(parser)

    def render(self, payload: dict) -> str:
        data = payload["data"]
        lines = [format_summary(data["summary"]).rstrip("\n")]
        lines.extend(f"wrote {name}: {path}" for name, path in sorted(data["outputs"].items()))
        return "\n".join(lines)
