"""Tests for controller specs, control laws and the reduction check."""

from __future__ import annotations

import math

import numpy as np
from django.test import SimpleTestCase

from backend.frequency_control.controllers.laws import controller_output, controller_rhs, initial_state, reported_marginals
from backend.frequency_control.controllers.reduction import reduction_check
from backend.frequency_control.controllers.specs import (
    FREQUENCY_SIGNAL_SCALES,
    AGCSpec,
    DAISpec,
    DecentralizedIntegralSpec,
    GatherBroadcastSpec,
    PassiveMode,
    circulant_weights,
    network_weights,
)
from backend.frequency_control.costs import CostModel
from backend.frequency_control.network import Branch, NetworkModel
from backend.shared.utils.errors import DimensionError, GridLabError


def kundur() -> NetworkModel:
    return NetworkModel(
        kinds=("generator", "generator", "frequency_responsive", "passive"),
        M=[2.0, 1.5, 0.0, 0.0],
        D=[1.0, 1.0, 1.0, 0.0],
        P=[0.6, 0.4, -0.5, -0.5],
        branches=(Branch(0, 2, 10.0), Branch(2, 3, 5.0), Branch(3, 1, 10.0), Branch(0, 1, 2.0)),
    )


TRIANGLE_COST = CostModel.scaled([0.5, 0.3, 0.2])


class GatherBroadcastSpecTests(SimpleTestCase):
    """Normalization and the broadcast law."""

    def test_normalization_rescales_gain_and_weights(self) -> None:
        """(C, k) → (C/ΣC, k/ΣC) leaves C/k unchanged."""

        spec = GatherBroadcastSpec.normalized(2.0, [1.0, 1.0, 2.0], TRIANGLE_COST)
        np.testing.assert_allclose(spec.weights, [0.25, 0.25, 0.5])
        self.assertAlmostEqual(spec.k, 0.5)

    def test_restrict_mode_drops_passive_weights(self) -> None:
        net = kundur()
        cost = CostModel.scaled([0.6, 0.4, 0.3, 0.0])
        spec = GatherBroadcastSpec.normalized(1.0, [1.0, 1.0, 1.0, 1.0], cost, net, PassiveMode.RESTRICT)
        self.assertEqual(spec.weights[3], 0.0)
        np.testing.assert_allclose(spec.weights[:3], [1 / 3, 1 / 3, 1 / 3])

    def test_implicit_mode_keeps_passive_weights(self) -> None:
        net = kundur()
        cost = CostModel.scaled([0.6, 0.4, 0.3, 0.0])
        spec = GatherBroadcastSpec.normalized(1.0, [1.0, 1.0, 1.0, 1.0], cost, net, "implicit")
        self.assertAlmostEqual(spec.weights[3], 0.25)

    def test_unnormalized_weights_are_rejected(self) -> None:
        with self.assertRaises(GridLabError):
            GatherBroadcastSpec(1.0, np.array([0.5, 0.3, 0.3]), TRIANGLE_COST)

    def test_broadcast_law(self) -> None:
        """k λ̇ = −s Σ C_i ω_i and u = (J')⁻¹(λ)."""

        spec = GatherBroadcastSpec.normalized(2.0, [0.5, 0.3, 0.2], TRIANGLE_COST)
        omega = np.array([0.1, -0.2, 0.4])
        rate = controller_rhs(spec, np.array([0.3]), omega)
        self.assertAlmostEqual(rate[0], -(0.05 - 0.06 + 0.08) / 2.0)
        np.testing.assert_allclose(controller_output(spec, np.array([0.3])), [0.15, 0.09, 0.06])

    def test_signal_scale_multiplies_the_measurement(self) -> None:
        scale = FREQUENCY_SIGNAL_SCALES["mHz"]
        self.assertAlmostEqual(scale, 1000 / (2 * math.pi))
        plain = GatherBroadcastSpec.normalized(1.0, [1.0, 0.0, 0.0], TRIANGLE_COST)
        scaled = GatherBroadcastSpec.normalized(1.0, [1.0, 0.0, 0.0], TRIANGLE_COST, signal_scale=scale)
        omega = np.array([0.01, 0.0, 0.0])
        self.assertAlmostEqual(controller_rhs(scaled, np.zeros(1), omega)[0], scale * controller_rhs(plain, np.zeros(1), omega)[0])

    def test_wrong_state_shape_is_rejected(self) -> None:
        spec = GatherBroadcastSpec.normalized(1.0, [1.0, 1.0, 1.0], TRIANGLE_COST)
        with self.assertRaises(DimensionError):
            controller_output(spec, np.zeros(3))


class IntegralControllerTests(SimpleTestCase):
    """Decentralized integral control and AGC."""

    def test_decentralized_law_with_bias(self) -> None:
        """k λ̇ = −(ω + η) on controlled buses only."""

        spec = DecentralizedIntegralSpec.uniform(3, [0, 2], 2.0, biases=[0.1, 0.0, -0.2])
        rate = controller_rhs(spec, np.zeros(3), np.array([0.3, 0.5, 0.1]))
        np.testing.assert_allclose(rate, [-0.2, 0.0, 0.05])
        np.testing.assert_allclose(controller_output(spec, np.array([1.0, 2.0, 3.0])), [1.0, 0.0, 3.0])
        self.assertEqual(spec.state_size, 3)

    def test_decentralized_needs_controlled_buses(self) -> None:
        with self.assertRaises(GridLabError):
            DecentralizedIntegralSpec.uniform(3, [], 1.0)

    def test_agc_measures_a_single_bus(self) -> None:
        spec = AGCSpec.from_denominators(4.0, 1, [2.0, 1.0, math.inf])
        np.testing.assert_allclose(spec.participation, [0.5, 1.0, 0.0])
        rate = controller_rhs(spec, np.array([0.0]), np.array([1.0, -0.4, 3.0]))
        self.assertAlmostEqual(rate[0], 0.1)
        np.testing.assert_allclose(controller_output(spec, np.array([2.0])), [1.0, 2.0, 0.0])

    def test_agc_measurement_bus_is_checked(self) -> None:
        with self.assertRaises(DimensionError):
            AGCSpec(1.0, 5, np.array([1.0, 1.0]))

    def test_initial_state_accepts_scalars_and_vectors(self) -> None:
        agc = AGCSpec(1.0, 0, np.array([1.0, 1.0]))
        np.testing.assert_allclose(initial_state(agc, 0.7), [0.7])
        spec = DecentralizedIntegralSpec.uniform(2, [0, 1], 1.0)
        np.testing.assert_allclose(initial_state(spec, [0.1, 0.2]), [0.1, 0.2])


class DAITests(SimpleTestCase):
    """Distributed averaging on marginal costs."""

    def setUp(self) -> None:
        self.W = circulant_weights([0, 1, 2], 3, [1], 1.0)

    def test_circulant_weights_are_symmetric(self) -> None:
        W = circulant_weights([0, 1, 2, 3, 4], 5, [1], 2.0)
        np.testing.assert_allclose(W, W.T)
        self.assertEqual(int(np.count_nonzero(W[0])), 2)
        self.assertEqual(W[0, 1], 2.0)
        self.assertEqual(W[0, 4], 2.0)

    def test_consensus_pulls_marginals_together(self) -> None:
        """The bus with the highest marginal cost lowers its injection."""

        spec = DAISpec(np.ones(3), self.W, TRIANGLE_COST)
        u = np.array([0.5, 0.0, 0.0])  # marginals 1, 0, 0
        rate = controller_rhs(spec, u, np.zeros(3))
        self.assertLess(rate[0], 0.0)
        self.assertGreater(rate[1], 0.0)
        self.assertAlmostEqual(float(np.sum(rate)), 0.0)

    def test_equal_marginals_are_an_equilibrium(self) -> None:
        spec = DAISpec(np.ones(3), self.W, TRIANGLE_COST)
        u = TRIANGLE_COST.inverse_marginal_all(0.4)
        np.testing.assert_allclose(controller_rhs(spec, u, np.zeros(3)), np.zeros(3), atol=1e-12)

    def test_cheater_reports_zero_and_ignores_neighbors(self) -> None:
        spec = DAISpec(np.ones(3), self.W, TRIANGLE_COST, cheaters=frozenset({0}))
        u = TRIANGLE_COST.inverse_marginal_all(0.4)
        true, reported = reported_marginals(spec, u)
        self.assertAlmostEqual(true[0], 0.4)
        self.assertEqual(reported[0], 0.0)
        rate = controller_rhs(spec, u, np.array([0.2, 0.0, 0.0]))
        self.assertAlmostEqual(rate[0], -0.2)
        self.assertAlmostEqual(rate[1], -0.4)

    def test_disconnected_communication_is_rejected(self) -> None:
        W = np.zeros((3, 3))
        W[0, 1] = W[1, 0] = 1.0
        with self.assertRaises(GridLabError):
            DAISpec(np.ones(3), W, TRIANGLE_COST)

    def test_edges_to_uncontrolled_buses_are_rejected(self) -> None:
        cost = CostModel.scaled([0.5, 0.5, 0.0])
        with self.assertRaises(GridLabError):
            DAISpec(np.ones(3), self.W, cost)

    def test_network_weights_follow_branches(self) -> None:
        W = network_weights(kundur(), [0, 1, 2], 3.0)
        self.assertEqual(W[0, 2], 3.0)
        self.assertEqual(W[0, 1], 3.0)
        self.assertEqual(W[2, 3], 0.0)


class ReductionCheckTests(SimpleTestCase):
    """Gather-and-broadcast special cases."""

    def test_one_hot_quadratic_is_agc(self) -> None:
        cost = CostModel.quadratic([1.0, 2.0, 4.0])
        spec = GatherBroadcastSpec.normalized(1.0, [0.0, 1.0, 0.0], cost)
        report = reduction_check(spec)
        self.assertEqual(report.kind, "agc")
        self.assertEqual(report.bus, 1)

    def test_agc_label_uses_external_ids(self) -> None:
        net = NetworkModel(
            ("generator", "generator"), [1.0, 1.0], [1.0, 1.0], [0.0, 0.0], (Branch(0, 1, 1.0),), bus_ids=(30, 39)
        )
        spec = GatherBroadcastSpec.normalized(1.0, [0.0, 1.0], CostModel.quadratic([1.0, 1.0]), net)
        self.assertEqual(reduction_check(spec, net).label, "AGC at bus 39")

    def test_uniform_weights_are_mean_field(self) -> None:
        spec = GatherBroadcastSpec.normalized(1.0, [1.0, 1.0, 1.0], TRIANGLE_COST)
        self.assertEqual(reduction_check(spec).kind, "mean_field")

    def test_damping_weights_are_all_to_all(self) -> None:
        """Passive buses carry no damping, so the damping share differs from uniform."""

        net = kundur()
        cost = CostModel.scaled([0.6, 0.4, 0.3, 0.0])
        spec = GatherBroadcastSpec.normalized(1.0, net.D, cost, net, "implicit")
        self.assertEqual(reduction_check(spec, net).kind, "all_to_all")

    def test_cost_weights_are_no_special_case(self) -> None:
        spec = GatherBroadcastSpec.normalized(1.0, [0.5, 0.3, 0.2], TRIANGLE_COST)
        self.assertEqual(reduction_check(spec).kind, "none")

    def test_other_variants_are_rejected(self) -> None:
        with self.assertRaises(GridLabError):
            reduction_check(AGCSpec(1.0, 0, np.array([1.0])))
