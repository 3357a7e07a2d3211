import math
import unittest

import numpy as np

from conedual.cones import (
    DecompositionWindowException,
    decompose_dual,
    exact_split,
    has_dominant_center,
    in_cone_P,
    is_positive_definite,
    solve_decomposition,
)
from conedual.enumerations.status import CertStatus, LpStatus, PdMethod
from conedual.oracle import SweepAxis, SweepSpec, sweep_optimize
from conedual.seqcore import SymmetricSequence, indicator_interval, pairing
from conedual.trig import CertOptions, TorusGrid, autocorrelation, fourier_eval
from conedual.wiener import witness_w

REFINED = CertOptions(eps_pd=1e-9, refine_levels=12)


class TestPositiveDefinite(unittest.TestCase):
    def test_witness_w_by_l1_bound(self):
        status = is_positive_definite(witness_w(3, 2), TorusGrid(1, 64))
        self.assertTrue(status.is_positive_definite)
        self.assertEqual(status.method, PdMethod.L1_BOUND)
        self.assertEqual(status.l1_bound, 0.0)

    def test_chi0(self):
        status = is_positive_definite(SymmetricSequence.chi0(1), TorusGrid(1, 16))
        self.assertEqual(status.method, PdMethod.L1_BOUND)
        self.assertEqual(status.l1_bound, 1.0)
        self.assertEqual(status.certified.margin, 0.0)

    def test_refuted_with_rechecked_witness(self):
        status = is_positive_definite(SymmetricSequence.from_values([1.0, 0.6]), TorusGrid(1, 1024))
        self.assertTrue(status.is_refuted)
        self.assertEqual(status.method, PdMethod.GRID_CERTIFICATE)
        self.assertAlmostEqual(status.witness[0], math.pi)
        self.assertAlmostEqual(status.witness_value, -0.2, places=12)

    def test_random_refutations_recheck(self):
        rng = np.random.default_rng(21)
        grid = TorusGrid(1, 128)
        for _ in range(200):
            h = SymmetricSequence.from_values([1.0] + rng.uniform(-0.6, 0.6, size=4).tolist())
            status = is_positive_definite(h, grid, REFINED)
            if status.is_refuted:
                self.assertLess(fourier_eval(h, status.witness), 0.0)
            if status.is_positive_definite:
                self.assertTrue(has_dominant_center(h, 1e-9))

    def test_in_cone_P(self):
        self.assertEqual(in_cone_P(SymmetricSequence.from_values([1.0, 0.5]), TorusGrid(1, 256), REFINED).status, CertStatus.CERTIFIED_NONNEG)
        chi0 = in_cone_P(SymmetricSequence.chi0(1), TorusGrid(1, 16))
        self.assertEqual((chi0.status, chi0.margin), (CertStatus.CERTIFIED_NONNEG, 0.0))
        self.assertEqual(in_cone_P(SymmetricSequence.from_values([1.0, 0.6]), TorusGrid(1, 256)).status, CertStatus.REFUTED)


class TestExactSplit(unittest.TestCase):
    def test_reproduces_phi_bitwise(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            phi = SymmetricSequence.from_values(rng.normal(size=5).tolist())
            g = SymmetricSequence.from_values(np.abs(rng.normal(size=5)).tolist())
            split = exact_split(phi, g)
            if split is None:
                continue
            g_split, h = split
            for k in range(5):
                self.assertEqual(g_split.value_at(k) + h.value_at(k), phi.value_at(k))
                self.assertGreaterEqual(g_split.value_at(k), 0.0)
                self.assertLessEqual(abs(g_split.value_at(k) - g.value_at(k)), 16 * math.ulp(g.value_at(k)))

    def test_same_binade_keeps_g(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            phi = SymmetricSequence.from_values((1.0 + rng.random(4)).tolist())
            g = SymmetricSequence.from_values((1.0 + rng.random(4)).tolist())
            g_split, h = exact_split(phi, g, shifts=0)
            for k in range(4):
                self.assertEqual(g_split.value_at(k), g.value_at(k))
                self.assertEqual(g.value_at(k) + h.value_at(k), phi.value_at(k))

    def test_shifts_g_when_h_alone_fails(self):
        # phi - g is an odd multiple of ulp(phi) in the binade above phi
        phi = SymmetricSequence.from_values([-(0.75 + 2.0**-53)])
        g = SymmetricSequence.from_values([0.75])
        self.assertIsNone(exact_split(phi, g, shifts=0))
        g_split, h = exact_split(phi, g)
        self.assertEqual(g_split.value_at(0) + h.value_at(0), phi.value_at(0))
        self.assertNotEqual(g_split.value_at(0), 0.75)
        self.assertLessEqual(abs(g_split.value_at(0) - 0.75), 2.0**-52)

    def test_no_split_below_ulp_of_g(self):
        self.assertIsNone(exact_split(SymmetricSequence.from_values([0.1]), SymmetricSequence.from_values([2.3])))


class TestDecomposition(unittest.TestCase):
    def test_chi0(self):
        decomposition = decompose_dual(SymmetricSequence.chi0(1), 2, TorusGrid(1, 64), REFINED)
        self.assertIsNotNone(decomposition)
        self.assertTrue(decomposition.reconstructs(SymmetricSequence.chi0(1)))
        self.assertTrue(decomposition.pd.is_positive_definite)

    def test_two_two_minus_one(self):
        phi = indicator_interval(1).scaled(3.0) - indicator_interval(2)
        self.assertEqual(phi.to_array(3).tolist(), [2.0, 2.0, -1.0])
        attempt = solve_decomposition(phi, 2, TorusGrid(1, 256), REFINED)
        self.assertTrue(attempt.succeeded)
        self.assertGreaterEqual(attempt.slack, -1e-9)
        decomposition = attempt.decomposition
        self.assertTrue(decomposition.reconstructs(phi))
        self.assertTrue(all(v >= 0.0 for v in decomposition.g.entries.values()))

    def test_two_two_minus_one_matches_sweep(self):
        phi = indicator_interval(1).scaled(3.0) - indicator_interval(2)
        # h(2) = phi(2) means g(2) = 0; the sweep finds the smallest feasible h(0)
        spec = SweepSpec(
            axes=(SweepAxis(0, 0.0, 2.0, 0.01), SweepAxis(1, -2.0, 2.0, 0.01)),
            fixed=SymmetricSequence.from_values([0.0, 0.0, -1.0]),
            grid=TorusGrid(1, 1024),
        )
        result = sweep_optimize(spec, workers=1)
        self.assertEqual(result.value, 2.0)
        self.assertEqual(result.point, (2.0, 0.0))
        g = phi - result.sequence
        self.assertTrue(all(v >= 0.0 for v in g.entries.values()))
        self.assertEqual(g.to_array(3).tolist(), [0.0, 2.0, 0.0])

    def test_random_phi_never_raises(self):
        rng = np.random.default_rng(11)
        grid = TorusGrid(1, 64)
        for _ in range(200):
            values = [3.0 + 2.0 * rng.random()] + rng.uniform(-0.5, 0.5, size=3).tolist()
            phi = SymmetricSequence.from_values(values)
            decomposition = decompose_dual(phi, 3, grid)
            if decomposition is None:
                continue
            self.assertTrue(decomposition.reconstructs(phi))
            self.assertTrue(all(v >= 0.0 for v in decomposition.g.entries.values()))
            self.assertTrue(decomposition.pd.is_positive_definite)

    def test_negative_phi_is_not_decomposable(self):
        attempt = solve_decomposition(SymmetricSequence.chi0(1).scaled(-1.0), 1, TorusGrid(1, 64), REFINED)
        self.assertFalse(attempt.succeeded)
        self.assertEqual(attempt.lp_status, LpStatus.OPTIMAL)
        self.assertLess(attempt.slack, 0.0)

    def test_window_must_contain_phi(self):
        with self.assertRaises(DecompositionWindowException):
            decompose_dual(SymmetricSequence.from_values([1.0, 0.0, 1.0]), 1, TorusGrid(1, 64))
        with self.assertRaises(DecompositionWindowException):
            decompose_dual(SymmetricSequence.chi0(1), 8, TorusGrid(1, 16))
        with self.assertRaises(DecompositionWindowException):
            decompose_dual(SymmetricSequence.chi0(2), 1, TorusGrid(2, 16))

    def test_decomposition_pairs_nonnegatively_with_C_and_P(self):
        phi = indicator_interval(1).scaled(3.0) - indicator_interval(2)
        decomposition = decompose_dual(phi, 2, TorusGrid(1, 256), REFINED)
        rng = np.random.default_rng(8)
        for _ in range(100):
            f = autocorrelation(rng.uniform(0.0, 1.0, size=rng.integers(1, 6)))
            self.assertGreaterEqual(pairing(f, phi), -1e-9 * f.l1_norm())
        self.assertTrue(has_dominant_center(decomposition.h, 1e-9))


if __name__ == "__main__":
    unittest.main()
