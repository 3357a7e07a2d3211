import math
import unittest

import numpy as np
from numpy.testing import assert_allclose

from conedual.enumerations.status import CertStatus
from conedual.seqcore import SymmetricSequence, pairing
from conedual.trig import (
    AtomicMeasure,
    CertifiedValue,
    CertOptions,
    NegativeWeightException,
    TorusGrid,
    TorusGridException,
    autocorrelation,
    certified_min,
    fourier_eval,
    fourier_values,
    grid_values,
    l1_lower_bound,
    parseval_check,
    synthesize_from_measure,
)
from conedual.wiener import witness_w

REFINED = CertOptions(eps_pd=1e-9, refine_levels=12)


class TestTorusGrid(unittest.TestCase):
    def test_invariants(self):
        with self.assertRaises(TorusGridException):
            TorusGrid(1, 3)
        with self.assertRaises(TorusGridException):
            TorusGrid(0, 16)
        grid = TorusGrid(2, 8)
        self.assertEqual(grid.size, 64)
        self.assertAlmostEqual(grid.mesh_radius, math.pi / 8 * math.sqrt(2))
        self.assertTrue(grid.refined(2).contains(grid))
        self.assertFalse(grid.contains(grid.refined(2)))

    def test_half_indices_cover_each_pair_once(self):
        for grid in (TorusGrid(1, 16), TorusGrid(2, 8)):
            G = grid.points_per_axis
            half = {tuple(j) for j in grid.half_indices().tolist()}
            full = {tuple(j) for j in grid.indices().tolist()}
            for j in full:
                mirror = tuple((-c) % G for c in j)
                self.assertTrue(j in half or mirror in half)
            self.assertIn((0,) * grid.dim, half)


class TestFourierEval(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(fourier_eval(SymmetricSequence.chi0(1), 1.234), 1.0)
        self.assertEqual(fourier_eval(SymmetricSequence.from_values([1.0, 0.5]), math.pi), 0.0)
        self.assertEqual(fourier_eval(witness_w(2, 1), 0.0), 0.0)

    def test_even_in_x(self):
        rng = np.random.default_rng(5)
        f = SymmetricSequence.from_dict(2, {(0, 0): 0.3, (1, 0): 0.7, (1, -2): -0.4, (0, 3): 1.1})
        points = rng.uniform(0, 2 * math.pi, size=(32, 2))
        assert_allclose(fourier_values(f, points), fourier_values(f, -points), rtol=0, atol=1e-12)

    def test_closed_form_identities(self):
        x = np.linspace(0.0, 2.0 * math.pi, 97)
        fejer = SymmetricSequence.from_values([1.0, 0.5])
        assert_allclose(fourier_values(fejer, x), 1.0 + np.cos(x), atol=1e-14)
        w = witness_w(2, 1)
        assert_allclose(fourier_values(w, x), 4.0 * np.sin(x) ** 2, atol=1e-13)

    def test_grid_values_hit_special_points_exactly(self):
        grid = TorusGrid(1, 4096)
        values = grid_values(SymmetricSequence.from_values([1.0, 0.5]), grid)
        self.assertEqual(values[2048], 0.0)
        self.assertEqual(values.min(), 0.0)


class TestCertifiedMin(unittest.TestCase):
    def test_constant(self):
        value = certified_min(SymmetricSequence.chi0(1), TorusGrid(1, 16))
        self.assertEqual((value.grid_min, value.margin, value.status), (1.0, 0.0, CertStatus.CERTIFIED_NONNEG))

    def test_refuted_at_pi(self):
        value = certified_min(SymmetricSequence.from_values([1.0, 0.6]), TorusGrid(1, 4096))
        self.assertEqual(value.status, CertStatus.REFUTED)
        self.assertAlmostEqual(value.grid_min, -0.2, places=12)
        self.assertAlmostEqual(value.witness[0], math.pi, places=12)

    def test_touching_zero_needs_tolerance(self):
        f = SymmetricSequence.from_values([1.0, 0.5])
        grid = TorusGrid(1, 4096)
        exact = certified_min(f, grid, CertOptions(eps_pd=0.0))
        self.assertEqual(exact.grid_min, 0.0)
        self.assertGreater(exact.margin, 0.0)
        self.assertEqual(exact.status, CertStatus.INCONCLUSIVE)
        refined = certified_min(f, grid, REFINED)
        self.assertEqual(refined.status, CertStatus.CERTIFIED_NONNEG)
        self.assertGreater(refined.levels, 0)

    def test_classify(self):
        self.assertEqual(CertifiedValue.classify(0.0, 1e-10, 1e-9), CertStatus.CERTIFIED_NONNEG)
        self.assertEqual(CertifiedValue.classify(-1e-8, 0.0, 1e-9), CertStatus.REFUTED)
        self.assertEqual(CertifiedValue.classify(0.0, 1e-3, 1e-9), CertStatus.INCONCLUSIVE)

    def test_bracket_contains_fine_grid_minimum(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            f = SymmetricSequence.from_values(rng.normal(size=6).tolist())
            grid = TorusGrid(1, 64)
            for options in (CertOptions(), REFINED):
                value = certified_min(f, grid, options)
                fine = grid_values(f, grid.refined(16)).min()
                self.assertLessEqual(value.lower_bound, fine + 1e-12)
                self.assertLessEqual(l1_lower_bound(f), value.grid_min)
                # grid_min starts from the half-grid values and only decreases
                self.assertLessEqual(value.grid_min, grid_values(f, grid, grid.half_indices()).min())
                coarse = grid_values(f, grid).min()
                self.assertLessEqual(value.grid_min, coarse + 8 * math.ulp(max(1.0, abs(coarse))))

    def test_two_dimensional(self):
        f = SymmetricSequence.from_dict(2, {(0, 0): 1.0, (1, 0): 0.25, (0, 1): 0.25})
        value = certified_min(f, TorusGrid(2, 32), REFINED)
        self.assertEqual(value.status, CertStatus.CERTIFIED_NONNEG)
        self.assertAlmostEqual(value.grid_min, 0.0, places=12)


class TestL1LowerBound(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(l1_lower_bound(SymmetricSequence.chi0(1)), 1.0)
        self.assertAlmostEqual(l1_lower_bound(SymmetricSequence.from_values([1.0, 0.6])), -0.2)
        for L in (2, 3, 4):
            for N in (1, 2, 3):
                self.assertEqual(l1_lower_bound(witness_w(L, N)), 0.0)


class TestMeasures(unittest.TestCase):
    def test_negative_weight_rejected(self):
        with self.assertRaises(NegativeWeightException):
            AtomicMeasure.from_points([0.0], [-1.0])

    def test_synthesis(self):
        at_zero = AtomicMeasure.from_points([0.0], [1.0])
        self.assertEqual(synthesize_from_measure(at_zero, [0, 1, 5]).to_array(6).tolist(), [1.0, 1.0, 0, 0, 0, 1.0])
        pair = AtomicMeasure.from_points([math.pi / 2, -math.pi / 2], [0.5, 0.5])
        assert_allclose(synthesize_from_measure(pair, [0, 1, 2]).to_array(3), [1.0, 0.0, -1.0], atol=1e-15)
        self.assertEqual(synthesize_from_measure(AtomicMeasure(1), [0, 1]), SymmetricSequence.zero(1))

    def test_synthesized_sequences_pair_nonnegatively_with_P(self):
        rng = np.random.default_rng(2)
        nu = AtomicMeasure.from_points(rng.uniform(0, 2 * math.pi, 6).tolist(), rng.uniform(0, 1, 6).tolist())
        h = synthesize_from_measure(nu, range(5))
        for _ in range(20):
            f = autocorrelation(rng.normal(size=5))
            self.assertGreaterEqual(pairing(f, h), -1e-12)

    def test_parseval_examples(self):
        f = SymmetricSequence.from_values([0.5, -0.25, 1.0])
        lhs, rhs = parseval_check(f, AtomicMeasure.from_points([0.0], [1.0]))
        self.assertAlmostEqual(lhs, rhs, places=14)
        self.assertAlmostEqual(lhs, 0.5 + 2 * (-0.25 + 1.0), places=14)
        nu = AtomicMeasure.from_points([0.3, 2.0], [0.25, 1.5])
        lhs, rhs = parseval_check(SymmetricSequence.chi0(1), nu)
        self.assertAlmostEqual(lhs, 1.75)
        self.assertAlmostEqual(rhs, 1.75)

    def test_parseval_random(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            f = SymmetricSequence.from_values(rng.normal(size=6).tolist())
            nu = AtomicMeasure.from_points(rng.uniform(0, 2 * math.pi, 4).tolist(), rng.uniform(0, 1, 4).tolist())
            lhs, rhs = parseval_check(f, nu)
            self.assertLessEqual(abs(lhs - rhs), 1e-10 * (1.0 + abs(lhs)))

    def test_autocorrelation(self):
        self.assertEqual(autocorrelation([1.0]), SymmetricSequence.chi0(1))
        self.assertEqual(autocorrelation([1.0, 0.0, 1.0]).to_array(3).tolist(), [2.0, 0.0, 1.0])
        assert_allclose(autocorrelation([1.0, -2.0]).to_array(2), [5.0, -2.0])


if __name__ == "__main__":
    unittest.main()
