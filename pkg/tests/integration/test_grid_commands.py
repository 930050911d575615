"""
Integration Tests for the Grid Lab Commands

Exercises the command-line entry point and the task registry the commands
run through: exit codes, printed results and error payloads.
"""

import json

import pytest

from apps.grid_lab.cli import cli
from apps.grid_lab.task_registry import task_registry


class TestCommandLine:
    """Exit codes and output of ``grid-lab <subcommand>``."""

    def test_validate_bundled_case(self, case_path, capsys):
        assert cli(["validate", str(case_path("ieee39"))]) == 0
        assert "is a valid case document" in capsys.readouterr().out

    def test_validate_by_bundled_name(self, capsys):
        assert cli(["validate", "ieee39.case"]) == 0
        assert "ieee39.json is a valid case document" in capsys.readouterr().out

    def test_validate_bundled_scenario_name(self, capsys):
        assert cli(["validate", "single_bias"]) == 0
        assert "is a valid scenario document" in capsys.readouterr().out

    def test_unknown_subcommand(self, capsys):
        assert cli(["optimize"]) == 2
        assert "unknown subcommand: optimize" in capsys.readouterr().err

    def test_missing_subcommand(self):
        assert cli([]) == 2

    def test_missing_argument_is_a_usage_error(self):
        assert cli(["simulate"]) == 2

    def test_unknown_case_is_a_domain_error(self, capsys):
        assert cli(["equilibrium", "atlantis"]) == 1
        assert "atlantis" in capsys.readouterr().err

    def test_equilibrium_prints_json(self, capsys):
        assert cli(["equilibrium", "triangle3"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["secure"] is True
        assert data["bus_ids"] == [1, 2, 3]
        assert data["lambda_star"] == pytest.approx(0.0, abs=1e-12)

    def test_dual_dispatch_with_history(self, tmp_path, capsys):
        history = tmp_path / "history.csv"
        assert cli(["dispatch", "triangle3", "--dual", "--history-csv", str(history)]) == 0
        out = capsys.readouterr().out
        assert "method = dual_decomposition" in out
        assert "kkt_passed = True" in out
        assert history.read_text().splitlines()[0].startswith("k,lambda,residual,omega")

    def test_simulate_writes_results(self, tmp_path, capsys):
        assert cli(["simulate", "zero_disturbance", "--horizon", "0.5", "--out", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "scenario = zero_disturbance" in out
        assert f"wrote csv: {tmp_path / 'zero_disturbance.csv'}" in out
        header = (tmp_path / "zero_disturbance.csv").read_text().splitlines()[0]
        assert header.startswith("t,theta_1")
        assert (tmp_path / "zero_disturbance.summary.txt").is_file()

    def test_compare_requires_controllers(self):
        assert cli(["compare", "zero_disturbance"]) == 2


class TestTaskRegistry:
    """Payloads returned by the registered grid tasks."""

    def test_all_grid_tasks_are_registered(self):
        assert sorted(task["subtask"] for task in task_registry.list_tasks().values()) == [
            "compare",
            "dispatch",
            "equilibrium",
            "simulate",
            "validate",
        ]
        assert task_registry.is_locked()

    def test_missing_params(self):
        payload, status = task_registry.execute_task("grid", "simulate", {})
        assert status == 400
        assert payload["error_code"] == "INVALID_INPUT"
        assert "scenario" in payload["error"]

    def test_unknown_subtask(self):
        payload, status = task_registry.execute_task("grid", "optimize", {})
        assert status == 404
        assert payload["error_code"] == "NOT_FOUND"

    def test_validate_uploaded_bytes(self):
        payload, status = task_registry.execute_task("grid", "validate", {"path": "upload.json"}, b"{not json")
        assert status == 400
        assert payload["error_code"] == "INVALID_CASE"

    def test_validate_missing_file(self, tmp_path):
        payload, status = task_registry.execute_task("grid", "validate", {"path": str(tmp_path / "none.json")})
        assert status == 400
        assert "file not found" in payload["error"]

    def test_validate_scenario(self, kundur_step):
        payload, status = task_registry.execute_task("grid", "validate", {"path": str(kundur_step)})
        assert status == 200
        assert payload["data"]["variant"] == "gather_broadcast"
        assert payload["data"]["disturbances"] == 1

    def test_dispatch_market_clearing(self):
        payload, status = task_registry.execute_task("grid", "dispatch", {"case": "triangle3"})
        assert status == 200
        data = payload["data"]
        assert data["method"] == "market_clearing"
        assert set(data["u_star"]) == {"1", "2", "3"}
        assert data["kkt"]["kkt_passed"] is True

    def test_compare_writes_the_table(self, kundur_step, tmp_path):
        params = {"scenario": str(kundur_step), "controllers": "gather_broadcast", "horizon": 5.0, "out": str(tmp_path)}
        payload, status = task_registry.execute_task("grid", "compare", params)
        assert status == 200
        assert payload["data"]["rows"][0]["label"] == "gather_broadcast"
        assert payload["insights"][0] == "1 of 1 controllers ran to completion"
        assert (tmp_path / "kundur_step-comparison.csv").is_file()
        assert (tmp_path / "kundur_step-gather_broadcast.csv").is_file()
