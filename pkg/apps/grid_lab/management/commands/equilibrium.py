from apps.grid_lab.management.commands._base import GridTaskCommand


class Command(GridTaskCommand):
    help = "Compute the optimal synchronous equilibrium of a case and check its security"
    subtask = "equilibrium"
    param_names = ("case",)

    def add_arguments(self, parser):
        parser.add_argument("case", help="Case JSON path or bundled case name")
        super().add_arguments(parser)
