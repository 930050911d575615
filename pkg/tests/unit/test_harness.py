"""Tests for case and scenario documents and result files."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, override_settings
from pydantic import ValidationError

from backend.frequency_control.controllers.specs import DecentralizedIntegralSpec, GatherBroadcastSpec
from backend.frequency_control.harness import (
    format_summary,
    load_case,
    load_scenario,
    parse_case,
    parse_scenario,
    parse_summary,
    serialize_case,
)
from backend.frequency_control.harness.scenarios import with_controller
from backend.frequency_control.harness.schemas import ControllerEntry, GaussianBiases
from backend.shared.utils.errors import CaseFileError, ScenarioError

BROKEN_CASE = """{
  "schema_version": "1",
  "document": "case",
  "name": "broken",
  "buses": [
    {"id": 1, "kind": "generator", "M": 1.0, "D": 1.0},
    {"id": 2, "kind": "frequency_responsive", "M": 0.0, "D": -1.0}
  ],
  "branches": [{"i": 1, "j": 2, "B": 1.0}]
}
"""


def scenario_text(**fields) -> str:
    document = {
        "schema_version": "1",
        "document": "scenario",
        "id": "triangle_step",
        "case": "triangle3",
        "controller": {"variant": "gather_broadcast", "k": 1.0},
        "disturbances": [{"t": 1.0, "bus": 2, "delta_p": -0.1}],
        "horizon": 5.0,
        "integrator": {"dt": 0.01},
    }
    document.update(fields)
    return json.dumps(document, indent=2)


class CaseFileTests(SimpleTestCase):
    """Bundled cases, validation diagnostics and serialization."""

    def test_bundled_cases_load(self) -> None:
        for name, buses in (("two_bus", 2), ("triangle3", 3), ("kundur4", 4), ("ieee39", 39)):
            with self.subTest(case=name):
                self.assertEqual(load_case(name).network.n_buses, buses)

    def test_ieee39_structure(self) -> None:
        """Buses 30-39 are the generators; every bus carries a seeded scaled cost."""

        bundle = load_case("ieee39")
        net = bundle.network
        self.assertEqual(len(net.branches), 46)
        self.assertEqual([net.bus_ids[i] for i in net.generator_idx], list(range(30, 40)))
        self.assertEqual(len(net.passive_idx), 0)
        self.assertEqual(len(bundle.cost.controlled_idx), 39)
        rng = np.random.default_rng(39)
        expected = [rng.uniform(0.1, 1.0) for _ in range(39)]
        np.testing.assert_allclose(bundle.cost.weights, expected)
        self.assertEqual(bundle.weights_seed, 39)

    def test_validation_error_points_at_the_field(self) -> None:
        with self.assertRaises(CaseFileError) as ctx:
            parse_case(BROKEN_CASE, "broken.json")
        error = ctx.exception
        self.assertEqual(error.path, "buses[1].D")
        self.assertEqual(error.line, 7)
        self.assertIn("broken.json:7", str(error))

    def test_invalid_json_reports_its_line(self) -> None:
        with self.assertRaises(CaseFileError) as ctx:
            parse_case('{\n  "document": "case",\n  "name": \n}', "bad.json")
        self.assertEqual(ctx.exception.line, 4)

    def test_unknown_case_name(self) -> None:
        with self.assertRaises(CaseFileError):
            load_case("no_such_case")

    def test_serialized_case_loads_back(self) -> None:
        bundle = load_case("kundur4")
        again = parse_case(serialize_case(bundle))
        np.testing.assert_allclose(again.network.P, bundle.network.P)
        np.testing.assert_allclose(again.network.branch_b, bundle.network.branch_b)
        self.assertEqual(again.network.bus_ids, bundle.network.bus_ids)
        self.assertTrue(again.cost.same_as(bundle.cost))

    def test_unknown_keys_are_rejected(self) -> None:
        document = json.loads(serialize_case(load_case("two_bus")))
        document["buses"][0]["colour"] = "red"
        with self.assertRaises(CaseFileError) as ctx:
            parse_case(json.dumps(document, indent=2), "two_bus.json")
        self.assertEqual(ctx.exception.path, "buses[0].colour")

    def test_unknown_scenario_keys_are_rejected(self) -> None:
        with self.assertRaises(ScenarioError):
            parse_scenario(scenario_text(solver="euler"), "triangle_step.json")

    def test_drawn_weights_are_written_out(self) -> None:
        document = json.loads(serialize_case(load_case("ieee39")))
        self.assertNotIn("weights_seed", document)
        self.assertIsNotNone(document["buses"][0]["cost"]["params"]["weight"])


class ControllerEntryTests(SimpleTestCase):
    """Validation of the controller section."""

    def test_variant_defaults(self) -> None:
        entry = ControllerEntry(variant="gather_broadcast")
        self.assertEqual(entry.weights, "cost")
        self.assertEqual(entry.passive_mode, "restrict")
        self.assertEqual(ControllerEntry(variant="decentralized_integral").controlled, "generators")

    def test_foreign_fields_are_rejected(self) -> None:
        with self.assertRaises(ValidationError):
            ControllerEntry(variant="gather_broadcast", cheaters=[1])

    def test_agc_needs_a_measurement_bus(self) -> None:
        with self.assertRaises(ValidationError):
            ControllerEntry(variant="agc")

    def test_dai_needs_communication(self) -> None:
        with self.assertRaises(ValidationError):
            ControllerEntry(variant="dai")

    def test_gain_must_be_positive(self) -> None:
        with self.assertRaises(ValidationError):
            ControllerEntry(variant="agc", measurement_bus=1, k=0.0)

    def test_bias_forms(self) -> None:
        gaussian = ControllerEntry(variant="decentralized_integral", biases={"gaussian": True, "std": 0.5})
        self.assertIsInstance(gaussian.biases, GaussianBiases)
        keyed = ControllerEntry(variant="decentralized_integral", biases={"1": 0.05})
        self.assertEqual(keyed.biases, {"1": 0.05})
        listed = ControllerEntry(variant="decentralized_integral", biases=[0.1, 0.2])
        self.assertEqual(listed.biases, [0.1, 0.2])


class ScenarioFileTests(SimpleTestCase):
    """Scenario resolution and overrides."""

    def test_with_controller_keeps_the_experiment(self) -> None:
        base = parse_scenario(scenario_text(), "triangle_step.json")
        swapped = with_controller(base, ControllerEntry(variant="decentralized_integral", k=2.0))
        self.assertIsInstance(swapped.controller, DecentralizedIntegralSpec)
        self.assertEqual(swapped.variant, "decentralized_integral")
        self.assertEqual(swapped.disturbances, base.disturbances)
        self.assertEqual(swapped.horizon, base.horizon)
        self.assertIsInstance(base.controller, GatherBroadcastSpec)

    def test_bundled_scenario_with_overrides(self) -> None:
        scenario = load_scenario("ne_step_gather_broadcast", {"horizon": 10.0, "dt": 0.002, "seed": 3})
        self.assertEqual(scenario.horizon, 10.0)
        self.assertEqual(scenario.integrator.dt, 0.002)
        self.assertEqual(scenario.integrator.record_every, 10)
        self.assertEqual(scenario.seed, 3)
        self.assertEqual(len(scenario.disturbances), 3)
        for disturbance in scenario.disturbances:
            self.assertAlmostEqual(disturbance.delta_p, -0.33)
        self.assertEqual(scenario.network.bus_ids[scenario.disturbances[0].bus], 4)
        self.assertIsInstance(scenario.controller, GatherBroadcastSpec)
        self.assertAlmostEqual(scenario.controller.signal_scale, 1000.0 / (2.0 * math.pi))
        self.assertEqual(scenario.variant, "gather_broadcast")

    def test_unknown_disturbance_bus(self) -> None:
        text = scenario_text(disturbances=[{"t": 1.0, "bus": 9, "delta_p": -0.1}])
        with self.assertRaises(ScenarioError) as ctx:
            parse_scenario(text, "triangle_step.json")
        self.assertEqual(ctx.exception.path, "disturbances[0].bus")
        self.assertIsNotNone(ctx.exception.line)

    def test_unknown_case(self) -> None:
        with self.assertRaises(ScenarioError) as ctx:
            parse_scenario(scenario_text(case="atlantis"), "triangle_step.json")
        self.assertEqual(ctx.exception.path, "case")

    def test_disturbance_beyond_horizon(self) -> None:
        with self.assertRaises(ScenarioError):
            parse_scenario(scenario_text(horizon=0.5), "triangle_step.json")

    def test_unknown_scenario_name(self) -> None:
        with self.assertRaises(ScenarioError):
            load_scenario("no_such_scenario")

    def test_keyed_biases_land_on_their_bus(self) -> None:
        scenario = load_scenario("single_bias")
        spec = scenario.controller
        self.assertIsInstance(spec, DecentralizedIntegralSpec)
        np.testing.assert_allclose(spec.biases, [0.05, 0.0, 0.0])
        self.assertEqual(spec.controlled, (0,))

    def test_gaussian_biases_follow_the_seed(self) -> None:
        first = load_scenario("bias_instability").controller.biases
        again = load_scenario("bias_instability").controller.biases
        other = load_scenario("bias_instability", {"seed": 12}).controller.biases
        np.testing.assert_array_equal(first, again)
        self.assertFalse(np.array_equal(first, other))

    def test_out_directory_wins(self) -> None:
        text = scenario_text(outputs={"csv": "results/triangle_step.csv"})
        scenario = parse_scenario(text, "triangle_step.json", base_dir=Path("/data"), overrides={"out": "/tmp/run"})
        self.assertEqual(scenario.csv_path, Path("/tmp/run/triangle_step.csv"))
        self.assertEqual(scenario.summary_path, Path("/tmp/run/triangle_step.summary.txt"))

    def test_document_paths_are_relative_to_the_file(self) -> None:
        text = scenario_text(outputs={"csv": "results/triangle_step.csv"})
        scenario = parse_scenario(text, "triangle_step.json", base_dir=Path("/data"))
        self.assertEqual(scenario.csv_path, Path("/data/results/triangle_step.csv"))

    @override_settings(GRID_LAB_OUTPUT_DIR=None)
    def test_no_outputs_without_a_location(self) -> None:
        scenario = parse_scenario(scenario_text(), "triangle_step.json")
        self.assertIsNone(scenario.csv_path)
        self.assertIsNone(scenario.summary_path)


class SummaryFormatTests(SimpleTestCase):
    """Key-value run summaries."""

    def test_format_is_sorted_key_value_lines(self) -> None:
        text = format_summary({"settled": True, "lambda_star": None, "nadir": 0.5, "u_final": [1.0, 2.0]})
        self.assertEqual(text, "lambda_star = none\nnadir = 0.5\nsettled = true\nu_final = 1.0,2.0\n")

    def test_parse_reads_values_back_as_text(self) -> None:
        parsed = parse_summary("a = 1\nnot a pair\nb = x = y\n")
        self.assertEqual(parsed, {"a": "1", "b": "x = y"})
