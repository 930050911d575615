"""Tests for response curves, cost models and Luré integrals."""

from __future__ import annotations

import math
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase

from backend.frequency_control.costs import (
    CostFamily,
    CostModel,
    LinearResponse,
    TanhResponse,
    bregman_lure,
    cost_value,
    dispatch_cost,
    inverse_marginal,
    lure_integral,
    marginal,
    unit_profit,
)
from backend.shared.utils.errors import CostDomainError, GridLabError


class ScaledCostTests(SimpleTestCase):
    """Scaled quadratic family (J_i')⁻¹(λ) = C_i·λ."""

    def setUp(self) -> None:
        self.cost = CostModel.scaled([0.5, 0.3, 0.2])

    def test_marginal_inverts_the_scaled_response(self) -> None:
        """With C = 0.5 a unit injection costs λ = 2 at the margin."""

        self.assertAlmostEqual(marginal(self.cost, 0, 1.0), 2.0)
        self.assertAlmostEqual(inverse_marginal(self.cost, 0, 2.0), 1.0)

    def test_round_trip_through_the_marginal(self) -> None:
        for bus in range(3):
            for lam in (-1.5, 0.0, 0.7):
                u = inverse_marginal(self.cost, bus, lam)
                self.assertAlmostEqual(marginal(self.cost, bus, u), lam)

    def test_best_response_vector(self) -> None:
        np.testing.assert_allclose(self.cost.inverse_marginal_all(0.5), [0.25, 0.15, 0.1])

    def test_slope_bounds_equal_weights(self) -> None:
        np.testing.assert_allclose(self.cost.slope_bounds(), [0.5, 0.3, 0.2])

    def test_linear_lure_integral_is_closed_form(self) -> None:
        """∫₀² λ dλ = 2 for the base response, scaled by C_i per bus."""

        self.assertAlmostEqual(lure_integral(self.cost, 2.0, 0.0), 2.0)
        self.assertAlmostEqual(lure_integral(self.cost, 2.0, 0.0, bus=0), 1.0)

    def test_non_controlled_bus_has_no_marginal(self) -> None:
        cost = CostModel.scaled([1.0, 0.0])
        self.assertEqual(cost.inverse_marginal(1, 3.0), 0.0)
        with self.assertRaises(CostDomainError):
            cost.marginal(1, 0.0)

    def test_negative_weight_is_rejected(self) -> None:
        with self.assertRaises(GridLabError):
            CostModel.scaled([0.5, -0.1])


class QuadraticCostTests(SimpleTestCase):
    """J_i(u) = ½A_i u² with optional bounds."""

    def test_weights_are_reciprocal_coefficients(self) -> None:
        cost = CostModel.quadratic([2.0, None])
        self.assertIs(cost.family, CostFamily.QUADRATIC)
        np.testing.assert_allclose(cost.weights, [0.5, 0.0])
        self.assertAlmostEqual(cost.marginal(0, 1.0), 2.0)

    def test_best_response_is_clamped_to_bounds(self) -> None:
        """A binding upper bound caps the injection."""

        cost = CostModel.quadratic([1.0], lower=[-0.5], upper=[0.5])
        self.assertAlmostEqual(cost.inverse_marginal(0, 10.0), 0.5)
        self.assertAlmostEqual(cost.inverse_marginal(0, -10.0), -0.5)
        self.assertTrue(cost.has_active_box)
        with self.assertRaises(CostDomainError):
            cost.marginal(0, 0.8)

    def test_cost_value_and_profit(self) -> None:
        """J(1) = ½·2·1² = 1; at price 2 the profit is 2 − 1."""

        cost = CostModel.quadratic([2.0, 4.0])
        self.assertAlmostEqual(cost_value(cost, 0, 1.0), 1.0)
        self.assertAlmostEqual(cost_value(cost, 0, 0.0), 0.0)
        self.assertAlmostEqual(dispatch_cost(cost, np.array([1.0, 0.5])), 1.0 + 0.5)
        self.assertAlmostEqual(unit_profit(cost, 0, 1.0, 2.0), 1.0)

    def test_profit_peaks_at_the_best_response(self) -> None:
        cost = CostModel.quadratic([2.0])
        price = 1.2
        best = cost.inverse_marginal(0, price)
        for offset in (-0.1, 0.1):
            self.assertGreater(unit_profit(cost, 0, best, price), unit_profit(cost, 0, best + offset, price))

    def test_bounded_lure_integral_uses_clipped_response(self) -> None:
        """∫₀² clip(λ, −0.5, 0.5) dλ = 0.125 + 0.75."""

        cost = CostModel.quadratic([1.0], lower=[-0.5], upper=[0.5])
        self.assertAlmostEqual(lure_integral(cost, 2.0, 0.0, bus=0), 0.875, places=8)


class TanhCostTests(SimpleTestCase):
    """Saturating responses r(λ) = tanh(k1·λ^k2)."""

    def test_tanh_bregman_distance(self) -> None:
        """ln cosh 2 − ln cosh 1 − tanh 1."""

        cost = CostModel.tanh([1.0])
        expected = math.log(math.cosh(2.0)) - math.log(math.cosh(1.0)) - math.tanh(1.0)
        self.assertAlmostEqual(bregman_lure(cost, 2.0, 1.0), expected, places=10)
        self.assertAlmostEqual(bregman_lure(cost, 2.0, 1.0), 0.12963, places=4)

    def test_bregman_vanishes_only_at_the_reference(self) -> None:
        cost = CostModel.tanh([0.4, 0.6], k1=1.0, k2=3)
        self.assertEqual(bregman_lure(cost, 0.8, 0.8), 0.0)
        for lam in (-1.0, 0.1, 1.5):
            self.assertGreater(bregman_lure(cost, lam, 0.8), 0.0)

    def test_bregman_rejects_a_mismatched_integral(self) -> None:
        """An integral below the tangent line means the response and its antiderivative disagree."""

        cost = CostModel.scaled([1.0])
        with patch("backend.frequency_control.costs.lure.lure_integral", return_value=0.5):
            with self.assertRaises(CostDomainError):
                bregman_lure(cost, 2.0, 1.0)

    def test_bregman_absorbs_quadrature_noise(self) -> None:
        cost = CostModel.scaled([1.0])
        with patch("backend.frequency_control.costs.lure.lure_integral", return_value=1.0 - 1e-11):
            self.assertEqual(bregman_lure(cost, 2.0, 1.0), 0.0)

    def test_deadzone_response_round_trip(self) -> None:
        cost = CostModel.tanh([1.0], k1=1.0, k2=3)
        u = cost.inverse_marginal(0, 0.9)
        self.assertAlmostEqual(u, math.tanh(0.9**3))
        self.assertAlmostEqual(cost.marginal(0, u), 0.9)

    def test_saturation_bounds_are_open(self) -> None:
        """|u| = C is never attained, so its marginal is undefined."""

        cost = CostModel.tanh([1.0])
        self.assertTrue(cost.open_bounds)
        self.assertEqual(cost.upper.tolist(), [1.0])
        with self.assertRaises(CostDomainError):
            cost.marginal(0, 1.0)

    def test_even_exponent_is_rejected(self) -> None:
        with self.assertRaises(GridLabError):
            TanhResponse(1.0, 2)

    def test_slope_bound_covers_the_response(self) -> None:
        """The bound holds over a dense λ grid."""

        response = TanhResponse(1.0, 3)
        grid = np.linspace(-3.0, 3.0, 6001)
        slopes = np.gradient(response(grid), grid)
        self.assertLessEqual(float(np.max(slopes)), response.slope_bound())

    def test_with_base_keeps_weights(self) -> None:
        cost = CostModel.scaled([0.5, 0.5]).with_base(TanhResponse(1.0, 3))
        self.assertIs(cost.family, CostFamily.TANH)
        np.testing.assert_allclose(cost.weights, [0.5, 0.5])
        self.assertEqual(LinearResponse(2.0), LinearResponse(2.0))
