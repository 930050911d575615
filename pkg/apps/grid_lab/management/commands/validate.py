from apps.grid_lab.management.commands._base import GridTaskCommand


class Command(GridTaskCommand):
    help = "Validate a case or scenario document"
    subtask = "validate"
    param_names = ("path",)

    def add_arguments(self, parser):
        parser.add_argument("path", help="Case or scenario JSON file, or a bundled name such as ieee39.case")
        super().add_arguments(parser)

    def render(self, payload: dict) -> str:
        return "\n".join(payload["insights"])
