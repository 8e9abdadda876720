import math

import numpy as np
from django.test import SimpleTestCase
from scipy import optimize

from calibration.services import decay_constant, make_profile, wavenumber
from oracles.services import (
    PiecewiseLinearPotential,
    integrate_transfer,
    loop_monodromy,
    lu_determinant,
    monodromy_tolerance,
    trace_residual,
)
from square_barrier.services import free_transfer, normalized_determinant, square_transfer
from triangular_barrier.services import TriangularBarrierSpec, airy_transfer, derive, determinant
from tunnel_circuits.exceptions import DomainError, EvaluationError


class LuDeterminantTest(SimpleTestCase):
    def test_matches_numpy_on_random_matrices(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            matrix = rng.normal(size=(4, 4))
            self.assertAlmostEqual(lu_determinant(matrix), np.linalg.det(matrix), delta=1e-12)

    def test_pivot_sign(self):
        swap = np.array([[0.0, 1.0], [1.0, 0.0]])
        self.assertEqual(lu_determinant(swap), -1.0)
        self.assertEqual(lu_determinant(np.eye(3)), 1.0)

    def test_singular_matrix(self):
        self.assertEqual(lu_determinant(np.ones((4, 4))), 0.0)

    def test_non_finite_entries(self):
        with self.assertRaises(EvaluationError):
            lu_determinant(np.array([[1.0, math.inf], [0.0, 1.0]]))


class IntegrateTransferTest(SimpleTestCase):
    def setUp(self):
        self.paper = make_profile('paper')
        self.si = make_profile('si')

    def test_free_region_matches_closed_form(self):
        k = wavenumber(self.paper, 0.95)
        numeric = integrate_transfer(PiecewiseLinearPotential.constant(0.0), 0.95, -1000.0, 0.0, 10000, self.paper)
        np.testing.assert_allclose(numeric.matrix, free_transfer(k, 1000.0).matrix, atol=1e-9)
        self.assertAlmostEqual(numeric.det, 1.0, delta=1e-9)

    def test_square_barrier_matches_closed_form(self):
        beta = decay_constant(self.paper, 0.95, 1.0)
        numeric = integrate_transfer(PiecewiseLinearPotential.constant(1.0), 0.95, 0.0, 1000.0, 10000, self.paper)
        exact = square_transfer(beta, 1000.0)
        self.assertLess(np.abs(numeric.matrix - exact.matrix).max(), 1e-9 * exact.norm)
        self.assertAlmostEqual(numeric.det, 1.0, delta=1e-9)

    def test_ramp_matches_airy_transfer(self):
        for profile, length in ((self.paper, 2.0), (self.si, 2.0)):
            derived = derive(TriangularBarrierSpec(0.95, 1.0, length, math.pi), profile)
            ramp = PiecewiseLinearPotential.ramp(derived.a, derived.c, 1.0, 0.0)
            numeric = integrate_transfer(ramp, 0.95, derived.a, derived.c, 10000, profile)
            exact = airy_transfer(derived)
            self.assertLess(np.abs(numeric.matrix - exact.matrix).max(), 1e-6 * max(1.0, exact.norm))
            self.assertAlmostEqual(numeric.det, 1.0, delta=1e-9)

    def test_fourth_order_convergence(self):
        k = wavenumber(self.si, 0.95)
        length = 4.0 / k
        exact = free_transfer(k, length).matrix
        zero = PiecewiseLinearPotential.constant(0.0)
        coarse = np.abs(integrate_transfer(zero, 0.95, 0.0, length, 200, self.si).matrix - exact).max()
        fine = np.abs(integrate_transfer(zero, 0.95, 0.0, length, 400, self.si).matrix - exact).max()
        self.assertTrue(12 <= coarse / fine <= 20, msg=f"ratio {coarse / fine}")

    def test_bad_interval(self):
        zero = PiecewiseLinearPotential.constant(0.0)
        with self.assertRaises(DomainError):
            integrate_transfer(zero, 0.95, 1.0, 1.0, 10, self.si)
        with self.assertRaises(DomainError):
            integrate_transfer(zero, 0.95, 0.0, 1.0, 0, self.si)

    def test_potential_nodes_must_be_sorted(self):
        with self.assertRaises(DomainError):
            PiecewiseLinearPotential(((1.0, 0.0), (0.0, 1.0)))
        self.assertEqual(PiecewiseLinearPotential.ramp(0.0, 2.0, 1.0, 0.0)(1.5), 0.25)


class LoopMonodromyTest(SimpleTestCase):
    def setUp(self):
        self.paper = make_profile('paper')

    def test_free_loop_of_one_turn(self):
        monodromy = loop_monodromy('square', 0.95, 1.0, -2 * math.pi, 0.0, self.paper, 10000)
        self.assertAlmostEqual(monodromy.trace, 2.0, delta=1e-10)

    def test_square_mode_closes_the_loop(self):
        k, beta, b = wavenumber(self.paper, 0.95), decay_constant(self.paper, 0.95, 1.0), 100.0
        root = optimize.brentq(normalized_determinant, math.radians(-1.6), math.radians(-1.4), args=(k, beta, b), xtol=1e-15)
        monodromy = loop_monodromy('square', 0.95, 1.0, root, b, self.paper, 10000)
        self.assertLess(abs(trace_residual(monodromy)), monodromy_tolerance(monodromy, beta * b))
        self.assertAlmostEqual(monodromy.det, 1.0, delta=1e-9)

    def test_square_trace_tracks_determinant_off_root(self): # Det = 2kβ·(2 − tr M)
        k, beta, b, theta = wavenumber(self.paper, 0.95), decay_constant(self.paper, 0.95, 1.0), 1000.0, -0.9
        monodromy = loop_monodromy('square', 0.95, 1.0, theta, b, self.paper, 10000)
        expected = normalized_determinant(theta, k, beta, b) * 4 * k * beta * math.cosh(beta * b)
        self.assertAlmostEqual(2 * k * beta * trace_residual(monodromy), expected, delta=1e-8 * 4 * k * beta * math.cosh(beta * b))

    def test_triangular_mode_closes_the_loop(self):
        derived = derive(TriangularBarrierSpec(0.95, 1.0, 2.0, math.pi), self.paper)
        offset = derived.k * 2.0
        root = optimize.brentq(
            determinant, 2 * math.pi - 1.3 * offset, 2 * math.pi - 0.8 * offset,
            args=(derived.X, derived.Y, derived.R), xtol=1e-15,
        )
        monodromy = loop_monodromy('triangular', 0.95, 1.0, root, 2.0, self.paper, 10000)
        self.assertLess(abs(trace_residual(monodromy)), 1e-8)

    def test_unknown_model(self):
        with self.assertRaises(DomainError):
            loop_monodromy('circular', 0.95, 1.0, -1.0, 1.0, self.paper, 10)

    def test_tolerance_scaling(self):
        monodromy = loop_monodromy('square', 0.95, 1.0, -1.0, 4000.0, self.paper, 1000)
        self.assertEqual(monodromy_tolerance(monodromy, 1.5), 1e-8)
        self.assertEqual(monodromy_tolerance(monodromy, 4.6), 1e-8 * monodromy.norm)
