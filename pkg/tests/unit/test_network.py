"""Tests for the network model and the power-flow kernels."""

from __future__ import annotations

import math

import numpy as np
from django.test import SimpleTestCase

from backend.frequency_control.harness import load_case
from backend.frequency_control.network import Branch, NetworkModel, check_security, flow_injections, hessian, potential
from backend.shared.utils.errors import DimensionError, GridLabError


def two_bus() -> NetworkModel:
    return NetworkModel(
        kinds=("generator", "passive"),
        M=[2.0, 0.0],
        D=[1.0, 0.0],
        P=[0.5, -0.5],
        branches=(Branch(0, 1, 1.0),),
        name="two_bus",
    )


def triangle() -> NetworkModel:
    return NetworkModel(
        kinds=("generator", "generator", "frequency_responsive"),
        M=[2.0, 1.5, 0.0],
        D=[1.0, 1.0, 1.0],
        P=[0.3, -0.1, -0.2],
        branches=(Branch(0, 1, 1.0), Branch(1, 2, 2.0), Branch(0, 2, 0.5)),
        bus_ids=(10, 20, 30),
    )


class NetworkModelTests(SimpleTestCase):
    """Bus roles, ids and construction checks."""

    def test_index_sets_follow_bus_kinds(self) -> None:
        """Generator, droop and passive indices partition the buses."""

        net = triangle()
        self.assertEqual(net.generator_idx.tolist(), [0, 1])
        self.assertEqual(net.responsive_idx.tolist(), [2])
        self.assertEqual(net.passive_idx.tolist(), [])
        self.assertEqual(net.dynamic_idx.tolist(), [0, 1, 2])
        self.assertAlmostEqual(net.total_damping, 3.0)

    def test_bus_ids_default_to_one_based(self) -> None:
        net = two_bus()
        self.assertEqual(net.bus_ids, (1, 2))
        self.assertEqual(net.index_of(2), 1)
        with self.assertRaises(GridLabError):
            net.index_of(7)

    def test_external_ids_translate_to_indices(self) -> None:
        self.assertEqual(triangle().index_of(30), 2)

    def test_generator_without_inertia_is_rejected(self) -> None:
        """A generator needs M > 0."""

        with self.assertRaises(GridLabError):
            NetworkModel(("generator", "passive"), [0.0, 0.0], [1.0, 0.0], [0.0, 0.0], (Branch(0, 1, 1.0),))

    def test_passive_bus_with_damping_is_rejected(self) -> None:
        with self.assertRaises(GridLabError):
            NetworkModel(("generator", "passive"), [1.0, 0.0], [1.0, 0.5], [0.0, 0.0], (Branch(0, 1, 1.0),))

    def test_disconnected_network_is_rejected(self) -> None:
        """Every bus must be reachable over the branches."""

        with self.assertRaises(GridLabError) as ctx:
            NetworkModel(
                ("generator", "frequency_responsive", "frequency_responsive"),
                [1.0, 0.0, 0.0],
                [1.0, 1.0, 1.0],
                [0.0, 0.0, 0.0],
                (Branch(0, 1, 1.0),),
            )
        self.assertIn("disconnected", str(ctx.exception))

    def test_non_positive_susceptance_is_rejected(self) -> None:
        with self.assertRaises(GridLabError):
            NetworkModel(("generator", "passive"), [1.0, 0.0], [1.0, 0.0], [0.0, 0.0], (Branch(0, 1, 0.0),))

    def test_injection_vector_length_is_checked(self) -> None:
        with self.assertRaises(DimensionError):
            NetworkModel(("generator", "passive"), [1.0, 0.0], [1.0, 0.0], [0.0], (Branch(0, 1, 1.0),))

    def test_graph_weights_edges_by_susceptance(self) -> None:
        graph = triangle().graph()
        self.assertEqual(sorted(graph.nodes), [0, 1, 2])
        self.assertEqual(graph.number_of_edges(), 3)
        self.assertAlmostEqual(graph[1][2]["weight"], 2.0)

    def test_with_injections_keeps_topology(self) -> None:
        net = triangle().with_injections([0.0, 0.0, 0.0])
        self.assertEqual(net.P.tolist(), [0.0, 0.0, 0.0])
        self.assertEqual(len(net.branches), 3)
        self.assertEqual(net.bus_ids, (10, 20, 30))


class FlowKernelTests(SimpleTestCase):
    """Line flows, potential energy, Hessian and security."""

    def test_two_bus_flows(self) -> None:
        """Flows are antisymmetric sin(θ_i − θ_j) injections."""

        flows = flow_injections(two_bus(), [0.3, 0.0])
        self.assertAlmostEqual(flows[0], math.sin(0.3))
        self.assertAlmostEqual(flows[1], -math.sin(0.3))

    def test_potential_matches_cosine_form(self) -> None:
        self.assertAlmostEqual(potential(two_bus(), [0.3, 0.0]), 1.0 - math.cos(0.3))

    def test_flows_are_gradient_of_potential(self) -> None:
        """Central differences of U reproduce the flow injections."""

        net = triangle()
        theta = np.array([0.2, -0.1, 0.05])
        step = 1e-6
        gradient = np.zeros(3)
        for i in range(3):
            shift = np.zeros(3)
            shift[i] = step
            gradient[i] = (potential(net, theta + shift) - potential(net, theta - shift)) / (2 * step)
        np.testing.assert_allclose(gradient, flow_injections(net, theta), atol=1e-8)

    def test_flows_sum_to_zero(self) -> None:
        self.assertAlmostEqual(float(np.sum(flow_injections(triangle(), [0.4, -0.3, 0.1]))), 0.0)

    def test_hessian_is_weighted_laplacian(self) -> None:
        """Symmetric with zero row sums."""

        H = hessian(triangle(), [0.1, 0.0, -0.2])
        np.testing.assert_allclose(H, H.T)
        np.testing.assert_allclose(H.sum(axis=1), np.zeros(3), atol=1e-12)
        self.assertAlmostEqual(H[0, 1], -math.cos(0.1))

    def test_hessian_matches_differenced_flows(self) -> None:
        """Central differences of the flow injections on random angles of the 39-bus case."""

        net = load_case("ieee39").network
        rng = np.random.default_rng(11)
        step = 1e-6
        for _ in range(5):
            theta = rng.uniform(-0.5, 0.5, net.n_buses)
            jacobian = np.zeros((net.n_buses, net.n_buses))
            for i in range(net.n_buses):
                shift = np.zeros(net.n_buses)
                shift[i] = step
                jacobian[:, i] = (flow_injections(net, theta + shift) - flow_injections(net, theta - shift)) / (2 * step)
            np.testing.assert_allclose(hessian(net, theta), jacobian, atol=1e-5)

    def test_hessian_is_positive_semidefinite_inside_the_security_region(self) -> None:
        net = triangle()
        rng = np.random.default_rng(5)
        for _ in range(20):
            theta = rng.uniform(-0.3, 0.3, 3)
            eigenvalues = np.linalg.eigvalsh(hessian(net, theta))
            self.assertGreaterEqual(eigenvalues[0], -1e-9)
            self.assertGreater(eigenvalues[1], 0.0)

    def test_security_reports_widest_branch(self) -> None:
        net = two_bus()
        secure = check_security(net, [0.2, 0.0])
        self.assertTrue(secure.secure)
        insecure = check_security(net, [1.7, 0.0])
        self.assertFalse(insecure.secure)
        self.assertEqual(insecure.worst_branch, (0, 1))
        self.assertAlmostEqual(insecure.worst_angle, 1.7)
        self.assertIn("1-2", insecure.describe(net))
