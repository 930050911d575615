"""Shared fixtures for Grid Lab integration tests."""

import json
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]


@pytest.fixture(autouse=True)
def output_dir(settings, tmp_path):
    """Keep default result files out of the repository."""
    settings.GRID_LAB_OUTPUT_DIR = tmp_path / "output"
    return settings.GRID_LAB_OUTPUT_DIR


@pytest.fixture
def case_path():
    """Path of a bundled case file."""
    return lambda name: REPO_ROOT / "data" / "cases" / f"{name}.json"


@pytest.fixture(scope="session")
def kundur_step(tmp_path_factory):
    """A 0.1 pu load step on the four-bus system, slow enough for dt = 0.01."""
    folder = tmp_path_factory.mktemp("kundur_step")
    document = {
        "schema_version": "1",
        "document": "scenario",
        "id": "kundur_step",
        "case": "kundur4",
        "controller": {"variant": "gather_broadcast", "k": 1.0},
        "disturbances": [{"t": 1.0, "bus": 3, "delta_p": -0.1}],
        "horizon": 30.0,
        "integrator": {"dt": 0.01, "record_every": 10},
        "seed": 5,
    }
    path = folder / "kundur_step.json"
    path.write_text(json.dumps(document, indent=2), encoding="utf-8")
    dai = {"label": "dai_network", "variant": "dai", "k": 1.0, "communication": {"topology": "network", "weight": 1.0}}
    (folder / "dai_network.json").write_text(json.dumps(dai), encoding="utf-8")
    return path
