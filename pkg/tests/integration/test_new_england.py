"""
Integration Tests on the 39-bus New England System

Full-size runs of the bundled step scenarios over their 40 s horizon. They take
minutes, so they carry the ``slow`` marker: ``pytest -m "not slow"`` skips them.
Each scenario runs once per module and is shared by the checks below.
"""

import numpy as np
import pytest

from backend.frequency_control.harness import load_scenario, run_scenario

pytestmark = pytest.mark.slow

RESTORING_SCENARIOS = [
    "ne_step_gather_broadcast",
    "ne_step_tanh",
    "ne_step_agc",
    "ne_step_dai",
    "ne_step_decentralized",
]


@pytest.fixture(scope="module")
def runs():
    """Lazily run bundled scenarios, each at most once."""
    cache = {}

    def run(name):
        if name not in cache:
            cache[name] = run_scenario(load_scenario(name), write_outputs=False)
        return cache[name]

    return run


class TestFrequencyRestoration:
    """Load steps of 3 x 33 MW at buses 4, 12 and 20."""

    @pytest.mark.parametrize("name", RESTORING_SCENARIOS)
    def test_frequency_returns_to_nominal(self, runs, name):
        summary = runs(name).summary
        assert summary["horizon"] == 40.0
        assert summary["final_max_abs_omega"] <= 1e-3
        assert summary["settling_time"] is not None
        assert summary["nadir"] < 0.0


class TestDispatchOptimality:
    """Where the controllers leave the injections once the frequency is back."""

    def test_gather_broadcast_stays_on_equal_marginals(self, runs):
        summary = runs("ne_step_gather_broadcast").summary
        assert summary["max_spread"] <= 1e-9
        assert summary["kkt_passed"] is True
        assert summary["reduction"] == "none"

    @pytest.mark.parametrize("name", ["ne_step_gather_broadcast", "ne_step_dai"])
    def test_final_dispatch_matches_market_clearing(self, runs, name):
        assert runs(name).summary["max_abs_u_gap"] <= 1e-4

    def test_agc_matches_its_participation_split(self, runs):
        summary = runs("ne_step_agc").summary
        assert summary["kkt_passed"] is True
        assert summary["max_abs_u_gap"] <= 1e-4

    def test_decentralized_integral_leaves_marginals_apart(self, runs):
        assert runs("ne_step_decentralized").summary["final_spread"] > 1e-2

    def test_storage_function_never_increases(self, runs):
        H = runs("ne_step_gather_broadcast").trajectory.H
        assert H is not None
        assert np.max(np.diff(H)) <= 1e-8


class TestMisreporting:
    """DAI with bus 30 reporting a zero marginal cost."""

    def test_cheating_bus_takes_the_whole_load(self, runs):
        summary = runs("ne_dai_cheating").summary
        assert summary["final_max_abs_omega"] <= 1e-5
        assert summary["honest_max_abs_u"] <= 1e-4
        assert summary["cheater_balance_error"] <= 1e-4
        assert summary["cheater_30_profit"] < summary["cheater_30_honest_profit"]

    def test_cheating_is_invisible_in_the_frequency(self, runs):
        cheating = runs("ne_dai_cheating").trajectory.omega[-1]
        honest = runs("ne_step_dai").trajectory.omega[-1]
        assert np.max(np.abs(cheating - honest)) <= 1e-6
