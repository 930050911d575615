# Harness package
# Case and scenario documents, experiment runs, comparisons and result files

from backend.frequency_control.harness.cases import CaseBundle, case_document, load_case, parse_case, serialize_case
from backend.frequency_control.harness.compare import PRESETS, Comparison, compare_controllers, parse_controllers
from backend.frequency_control.harness.persistence import format_summary, parse_summary, write_summary, write_trajectory_csv
from backend.frequency_control.harness.runner import ScenarioResult, run_scenario
from backend.frequency_control.harness.scenarios import Scenario, build_controller, load_scenario, parse_scenario

__all__ = [
    "CaseBundle",
    "Comparison",
    "PRESETS",
    "Scenario",
    "ScenarioResult",
    "build_controller",
    "case_document",
    "compare_controllers",
    "format_summary",
    "load_case",
    "load_scenario",
    "parse_case",
    "parse_controllers",
    "parse_scenario",
    "parse_summary",
    "run_scenario",
    "serialize_case",
    "write_summary",
    "write_trajectory_csv",
]
