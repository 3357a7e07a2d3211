import unittest

import numpy as np

from conedual.cones import is_positive_definite
from conedual.oracle import (
    OracleException,
    SweepAxis,
    SweepCapException,
    SweepSpec,
    nonpd_witness,
    sweep_optimize,
    toeplitz_necessary_check,
)
from conedual.seqcore import DimensionMismatchException, SymmetricSequence, pairing
from conedual.trig import CertOptions, TorusGrid, fourier_eval


def k21_sweep(h0_stop=4.0, step=1e-2, points_per_axis=512):
    return SweepSpec(
        axes=(SweepAxis(0, 0.0, h0_stop, step), SweepAxis(1, -2.0, 2.0, step)),
        fixed=SymmetricSequence(1, {2: -1.0}),
        grid=TorusGrid(1, points_per_axis),
    )


class TestSweepOptimize(unittest.TestCase):
    def test_alpha_sweep(self):
        spec = SweepSpec(
            axes=(SweepAxis(1, -1.0, 1.0, 1e-4),),
            fixed=SymmetricSequence.chi0(1),
            objective="pairing",
            reference=SymmetricSequence.from_values([1.0, 1.0]),
            grid=TorusGrid(1, 2**12),
        )
        result = sweep_optimize(spec)
        self.assertTrue(result.feasible)
        self.assertAlmostEqual(result.value, 0.0, places=9)
        self.assertAlmostEqual(result.point[0], -0.5, places=9)
        self.assertEqual(result.evaluated, 20001)

    def test_k21_sweep(self):
        result = sweep_optimize(k21_sweep())
        self.assertEqual(result.value, 2.0)
        self.assertEqual(result.point, (2.0, 0.0))
        self.assertGreater(result.feasible_count, 0)
        self.assertEqual(result.sequence.value_at(2), -1.0)

    def test_none_feasible(self):
        result = sweep_optimize(k21_sweep(h0_stop=0.5))
        self.assertFalse(result.feasible)
        self.assertIsNone(result.value)
        self.assertEqual(result.feasible_count, 0)
        self.assertFalse(result.as_dict()["feasible"])

    def test_maximize(self):
        # largest f(1) with 1 + 2 f(1) cos x >= 0 is 1/2
        spec = SweepSpec(
            axes=(SweepAxis(1, -1.0, 1.0, 0.25),),
            fixed=SymmetricSequence.chi0(1),
            objective="pairing",
            reference=SymmetricSequence.from_values([0.0, 1.0]),
            sense="MAX",
            grid=TorusGrid(1, 64),
        )
        result = sweep_optimize(spec)
        self.assertEqual(result.point, (0.5,))
        self.assertEqual(result.value, 1.0)

    def test_worker_count_does_not_change_result(self):
        single = sweep_optimize(k21_sweep(step=5e-2), workers=1)
        pooled = sweep_optimize(k21_sweep(step=5e-2), workers=4)
        self.assertEqual(single, pooled)

    def test_cap(self):
        spec = SweepSpec(
            axes=(SweepAxis(1, -1.0, 1.0, 1e-3),),
            fixed=SymmetricSequence.chi0(1),
            grid=TorusGrid(1, 64),
            cap=1000,
        )
        with self.assertRaises(SweepCapException):
            sweep_optimize(spec)

    def test_invalid_specs(self):
        grid = TorusGrid(1, 64)
        with self.assertRaises(OracleException):
            SweepAxis(1, 1.0, 0.0, 0.1)
        with self.assertRaises(OracleException):
            SweepSpec(axes=(), fixed=SymmetricSequence.chi0(1), grid=grid)
        with self.assertRaises(OracleException):
            SweepSpec(axes=(SweepAxis(1, 0.0, 1.0, 0.5),), fixed=SymmetricSequence.chi0(1), grid=grid, objective="pairing")
        with self.assertRaises(OracleException):
            SweepSpec(axes=(SweepAxis(1, 0.0, 1.0, 0.5), SweepAxis(-1, 0.0, 1.0, 0.5)), fixed=SymmetricSequence.chi0(1), grid=grid)
        with self.assertRaises(OracleException):
            SweepSpec(axes=(SweepAxis(0, 0.0, 1.0, 0.5),), fixed=SymmetricSequence.chi0(1), grid=grid)
        with self.assertRaises(DimensionMismatchException):
            SweepSpec(axes=(SweepAxis(1, 0.0, 1.0, 0.5),), fixed=SymmetricSequence.chi0(2), grid=grid)


class TestToeplitz(unittest.TestCase):
    def test_examples(self):
        for order in (1, 5, 20):
            self.assertTrue(toeplitz_necessary_check(SymmetricSequence.chi0(1), order))
        self.assertTrue(toeplitz_necessary_check(SymmetricSequence.from_values([1.0, 0.6]), 1))
        self.assertFalse(toeplitz_necessary_check(SymmetricSequence.from_values([1.0, 2.0]), 1))

    def test_necessary_only(self):
        h = SymmetricSequence.from_values([1.0, 0.6])
        self.assertTrue(is_positive_definite(h, TorusGrid(1, 64)).is_refuted)
        self.assertLess(fourier_eval(h, np.pi), 0.0)
        self.assertFalse(toeplitz_necessary_check(h, 10))
        f, value = nonpd_witness(h, 10)
        self.assertLess(value, 0.0)
        self.assertAlmostEqual(pairing(f, h), value, places=10)

    def test_no_witness_for_positive_sections(self):
        self.assertIsNone(nonpd_witness(SymmetricSequence.from_values([2.0, 0.0, -1.0]), 8))

    def test_certified_sequences_pass(self):
        rng = np.random.default_rng(3)
        options = CertOptions(refine_levels=2)
        for _ in range(100):
            h = SymmetricSequence.from_values(rng.normal(size=4).tolist())
            if not is_positive_definite(h, TorusGrid(1, 256), options).is_positive_definite:
                continue
            for order in range(1, 2 * h.radius() + 1):
                self.assertTrue(toeplitz_necessary_check(h, order))

    def test_invalid_input(self):
        with self.assertRaises(DimensionMismatchException):
            toeplitz_necessary_check(SymmetricSequence.chi0(2), 2)
        with self.assertRaises(OracleException):
            toeplitz_necessary_check(SymmetricSequence.chi0(1), 0)


if __name__ == "__main__":
    unittest.main()
