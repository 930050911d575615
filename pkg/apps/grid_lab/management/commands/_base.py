"""
Shared plumbing for Grid Lab management commands.
Each command gathers its options into task params, runs the task through the
registry and prints the result; error payloads become CommandError(returncode=1).
"""

import json
import logging

from django.core.management.base import BaseCommand, CommandError

from apps.grid_lab.task_registry import task_registry

logger = logging.getLogger(__name__)


def add_scenario_overrides(parser) -> None:
    """Flags that override scenario fields."""
    parser.add_argument("--seed", type=int, help="Override the scenario seed")
    parser.add_argument("--dt", type=float, help="Override the integration step (s)")
    parser.add_argument("--horizon", type=float, help="Override the simulated horizon (s)")
    parser.add_argument("--out", help="Directory for the trajectory CSV and summary files")


class GridTaskCommand(BaseCommand):
    subtask = ""
    param_names: tuple = ()

    def add_arguments(self, parser):
        parser.add_argument("--json", action="store_true", help="Print the full response payload as JSON")

    def params_from(self, options: dict) -> dict:
        return {name: options[name] for name in self.param_names if options.get(name) is not None}

    def render(self, payload: dict) -> str:
        return json.dumps(payload["data"], indent=2, default=str)

    def handle(self, *args, **options):
        params = self.params_from(options)
        payload, status = task_registry.execute_task("grid", self.subtask, params)
        if status != 200:
            raise CommandError(payload["error"], returncode=1)
        for insight in payload.get("insights", []):
            logger.info(insight)
        if options.get("json"):
            self.stdout.write(json.dumps(payload, indent=2, default=str))
        else:
            self.stdout.write(self.render(payload))
