import math

import numpy as np
from django.test import SimpleTestCase
from scipy import optimize

from calibration.services import decay_constant, make_profile, wavenumber
from square_barrier.services import (
    SquareBarrierSpec,
    analytic_monodromy,
    asymptotic_theta,
    build_matrix,
    derive,
    determinant_closed_form,
    determinant_matrix,
    field,
    free_transfer,
    normalized_determinant,
    scaled_matrix,
    square_transfer,
)
from tunnel_circuits.exceptions import DomainError, EvaluationError


def largest_cofactor(matrix):
    rows, cols = matrix.shape
    return max(
        abs(np.linalg.det(np.delete(np.delete(matrix, i, axis=0), j, axis=1)))
        for i in range(rows)
        for j in range(cols)
    )


class SquareSetupMixin:
    def setUp(self):
        self.paper = make_profile('paper')
        self.k = wavenumber(self.paper, 0.95)
        self.beta = decay_constant(self.paper, 0.95, 1.00)


class DeriveTest(SquareSetupMixin, SimpleTestCase):
    def test_theta_for_short_barrier(self):
        derived = derive(SquareBarrierSpec(0.95, 1.00, -0.026320, 0.50), self.paper)
        self.assertAlmostEqual(derived.theta, -1.3141e-4, delta=1e-7)
        self.assertEqual(derived.k, self.k)
        self.assertEqual(derived.beta, self.beta)

    def test_theta_for_long_barrier(self): # table constants sit about 4e-5 away from CODATA
        derived = derive(SquareBarrierSpec(0.95, 1.00, -719.4395, 1000.0), self.paper)
        self.assertLess(abs(derived.theta / -3.592621 - 1), 1e-4)

    def test_zero_coordinate_is_degenerate(self):
        with self.assertLogs('square_barrier.services', level='WARNING'):
            derived = derive(SquareBarrierSpec(0.95, 1.00, 0.0, 0.50), self.paper)
        self.assertEqual(derived.theta, 0.0)

    def test_domain_checks(self):
        with self.assertRaisesMessage(DomainError, "energy must be below barrier potential"):
            SquareBarrierSpec(1.05, 1.00, -1.0, 0.5)
        with self.assertRaises(DomainError):
            SquareBarrierSpec(0.95, 1.00, -1.0, 0.0)
        with self.assertRaises(DomainError):
            SquareBarrierSpec(0.95, 1.00, 1.0, 0.5)


class ClosedFormTest(SquareSetupMixin, SimpleTestCase):
    def test_full_turn_reduces_to_cosh_form(self):
        for y in (0.1, 1.0, 5.0, 20.0):
            b = y / self.beta
            expected = 4 * self.k * self.beta * (1 - math.cosh(y))
            self.assertLess(abs(determinant_closed_form(2 * math.pi, self.k, self.beta, b) / expected - 1), 1e-12)

    def test_half_turn_reduces_to_cosh_form(self):
        for y in (0.1, 1.0, 5.0, 20.0):
            b = y / self.beta
            expected = 4 * self.k * self.beta * (1 + math.cosh(y))
            self.assertLess(abs(determinant_closed_form(-math.pi, self.k, self.beta, b) / expected - 1), 1e-12)

    def test_scaled_above_threshold(self):
        b = 40.0 / self.beta
        theta = -0.3
        scaled = determinant_closed_form(theta, self.k, self.beta, b)
        literal = 2 * (self.beta**2 - self.k**2) * math.sin(theta) * math.sinh(40.0) + 4 * self.k * self.beta * (1 - math.cos(theta) * math.cosh(40.0))
        self.assertLess(abs(scaled * math.exp(40.0) / literal - 1), 1e-10)

    def test_normalized_determinant_is_closed_form_over_cosh(self):
        for theta in np.linspace(-2 * math.pi, 0.0, 37):
            for y in (1e-3, 0.5, 3.0, 25.0):
                b = y / self.beta
                expected = determinant_closed_form(theta, self.k, self.beta, b) / (4 * self.k * self.beta * math.cosh(y))
                self.assertAlmostEqual(normalized_determinant(theta, self.k, self.beta, b), expected, delta=1e-13)

    def test_normalized_determinant_stays_finite_for_huge_barriers(self):
        value = normalized_determinant(-0.4, self.k, self.beta, 1e6)
        self.assertTrue(math.isfinite(value))

    def test_small_barrier_roots(self): # Θ ≈ −β²b/k and Θ ≈ −2π + kb
        b = 0.5
        self.assertLess(abs(normalized_determinant(-self.beta**2 * b / self.k, self.k, self.beta, b)), 1e-12)
        self.assertLess(abs(normalized_determinant(-2 * math.pi + self.k * b, self.k, self.beta, b)), 1e-10)

    def test_scale_invariance(self):
        theta, b = -0.7, 300.0
        reference = normalized_determinant(theta, self.k, self.beta, b)
        literal = determinant_closed_form(theta, self.k, self.beta, b)
        for s in (1e-3, 1.0, 1e3):
            self.assertAlmostEqual(normalized_determinant(theta, s * self.k, s * self.beta, b / s), reference, delta=1e-12 * max(1.0, abs(reference)))
            self.assertLess(abs(determinant_closed_form(theta, s * self.k, s * self.beta, b / s) / (s**2 * literal) - 1), 1e-12)


class BoundaryMatrixTest(SquareSetupMixin, SimpleTestCase):
    def test_matrix_entries(self):
        matrix = build_matrix(-0.3, self.k, self.beta, 10.0)
        np.testing.assert_array_equal(matrix[0], [1.0, 0.0, -1.0, -1.0])
        np.testing.assert_array_equal(matrix[1], [0.0, self.k, -self.beta, self.beta])
        self.assertEqual(matrix[2, 2], -math.exp(self.beta * 10.0))
        self.assertEqual(matrix[3, 3], -self.beta * math.exp(-self.beta * 10.0))

    def test_dependent_rows_give_zero(self):
        self.assertAlmostEqual(determinant_matrix(0.0, self.k, self.beta, 0.0), 0.0, delta=1e-15)

    def test_matrix_agrees_with_closed_form_on_random_draws(self):
        rng = np.random.default_rng(20240611)
        for _ in range(1000):
            magnitude = 10 ** rng.uniform(-3, 1)
            k = magnitude * rng.uniform(0.5, 2.0)
            beta = magnitude * rng.uniform(0.5, 2.0)
            theta = rng.uniform(-2 * math.pi, 2 * math.pi)
            b = rng.uniform(0.0, 20.0) / beta
            scale = (k + beta) ** 2 * math.cosh(beta * b)
            difference = determinant_matrix(theta, k, beta, b) - determinant_closed_form(theta, k, beta, b)
            self.assertLessEqual(abs(difference), 1e-12 * scale)

    def test_lu_vanishes_at_a_tabulated_root(self):
        b = 100.0
        root = optimize.brentq(
            normalized_determinant, math.radians(-1.6), math.radians(-1.4), args=(self.k, self.beta, b), xtol=1e-15
        )
        self.assertLess(abs(math.degrees(root) / -1.5041 - 1), 1e-3)
        matrix = build_matrix(root, self.k, self.beta, b)
        self.assertLess(abs(determinant_matrix(root, self.k, self.beta, b)), 1e-9 * largest_cofactor(matrix))

    def test_literal_matrix_refuses_overflow(self):
        with self.assertRaises(EvaluationError):
            build_matrix(-0.5, self.k, self.beta, 1000.0 / self.beta)

    def test_scaled_matrix_rescales_growing_column(self):
        b = 10.0
        literal = build_matrix(-0.3, self.k, self.beta, b)
        scaled = scaled_matrix(-0.3, self.k, self.beta, b)
        expected = literal.copy()
        expected[:, 2] *= math.exp(-self.beta * b)
        np.testing.assert_allclose(scaled, expected, rtol=1e-14, atol=0.0)

    def test_scaled_matrix_is_finite_for_any_length(self):
        matrix = scaled_matrix(-0.5, self.k, self.beta, 5000.0 / self.beta)
        self.assertTrue(np.all(np.isfinite(matrix)))
        np.testing.assert_array_equal(matrix[2], [math.cos(-0.5), math.sin(-0.5), -1.0, 0.0])


class AsymptoticTest(SquareSetupMixin, SimpleTestCase):
    def test_branch_angles(self):
        self.assertAlmostEqual(math.degrees(asymptotic_theta(self.k, self.beta, 0)), -25.84194, delta=1e-4)
        self.assertAlmostEqual(math.degrees(asymptotic_theta(self.k, self.beta, -1)), -205.84194, delta=1e-4)

    def test_long_barrier_root_approaches_limit(self):
        theta = asymptotic_theta(self.k, self.beta, 0)
        self.assertLess(abs(normalized_determinant(theta, self.k, self.beta, 60.0 / self.beta)), 1e-12)

    def test_positive_branch_rejected(self):
        with self.assertRaises(DomainError):
            asymptotic_theta(self.k, self.beta, 1)


class TransferTest(SquareSetupMixin, SimpleTestCase):
    def test_unit_determinants(self):
        self.assertAlmostEqual(free_transfer(self.k, 123.0).det, 1.0, delta=1e-12)
        self.assertAlmostEqual(square_transfer(self.beta, 900.0).det, 1.0, delta=1e-12)

    def test_monodromy_trace_reproduces_determinant(self): # Det = 2kβ·(2 − tr M)
        for theta in (-0.2, -1.5, -4.0):
            for b in (0.5, 100.0, 1000.0):
                monodromy = analytic_monodromy(theta, self.k, self.beta, b)
                expected = determinant_closed_form(theta, self.k, self.beta, b)
                scale = 4 * self.k * self.beta * math.cosh(self.beta * b)
                self.assertAlmostEqual(2 * self.k * self.beta * (2 - monodromy.trace), expected, delta=1e-12 * scale)

    def test_field_forms(self):
        coefficients = (0.3, -0.2, 0.6, 0.1)
        psi, dpsi = field(coefficients, self.k, self.beta, 0.0, 'I')
        self.assertAlmostEqual(psi, 0.3, delta=1e-15)
        self.assertAlmostEqual(dpsi, -0.2 * self.k, delta=1e-18)
        psi, dpsi = field(coefficients, self.k, self.beta, 0.0, 'II')
        self.assertAlmostEqual(psi, 0.7, delta=1e-15)
        self.assertAlmostEqual(dpsi, 0.5 * self.beta, delta=1e-18)

    def test_scaled_field_reads_growing_coefficient_at_far_end(self):
        b = 2000.0 / self.beta
        psi, dpsi = field((0.0, 0.0, 0.6, 0.1), self.k, self.beta, [0.0, b], 'II', barrier_length=b)
        self.assertAlmostEqual(psi[0], 0.1, delta=1e-15)
        self.assertAlmostEqual(psi[1], 0.6, delta=1e-15)
        self.assertAlmostEqual(dpsi[1], 0.6 * self.beta, delta=1e-15 * self.beta)
