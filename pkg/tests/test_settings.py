import os
import unittest
from unittest import mock

from conedual.conedual_base import ConeDualBase, ConeDualConfigException, Settings, SolverFailureException
from conedual.enumerations.lp_terms import Relation, Sense
from conedual.lp import LinearProgram


class TestSettings(unittest.TestCase):
    @mock.patch.dict(os.environ, {}, clear=True)
    def test_defaults(self):
        settings = Settings.from_env()
        self.assertEqual(settings, Settings())
        self.assertEqual(settings.eps_pd, 1e-9)
        self.assertIsNone(settings.workers)

    @mock.patch.dict(
        os.environ,
        {
            "CONEDUAL_EPS_PD": "1e-8",
            "CONEDUAL_WORKERS": "3",
            "CONEDUAL_LOG": "debug",
            "CONEDUAL_REFINE_LEVELS": "5",
            "CONEDUAL_LP_DUMP_DIR": "",
        },
        clear=True,
    )
    def test_environment(self):
        settings = Settings.from_env()
        self.assertEqual(settings.eps_pd, 1e-8)
        self.assertEqual(settings.workers, 3)
        self.assertEqual(settings.log_level, "DEBUG")
        self.assertEqual(settings.refine_levels, 5)
        self.assertIsNone(settings.lp_dump_dir)

    @mock.patch.dict(os.environ, {"CONEDUAL_WORKERS": "auto", "CONEDUAL_EPS_PD": "1e-8"}, clear=True)
    def test_overrides_take_precedence(self):
        settings = Settings.from_env(eps_pd=1e-6, workers=None)
        self.assertEqual(settings.eps_pd, 1e-6)
        self.assertIsNone(settings.workers)
        self.assertEqual(settings.with_overrides(workers=2).workers, 2)

    @mock.patch.dict(os.environ, {"CONEDUAL_WORKERS": "many"}, clear=True)
    def test_unparsable_value(self):
        with self.assertRaises(ConeDualConfigException):
            Settings.from_env()

    def test_invalid_values(self):
        for overrides in ({"eps_pd": -1.0}, {"workers": 0}, {"refine_factor": 1}, {"log_level": "LOUD"}, {"max_iterations": 0}):
            with self.assertRaises(ConeDualConfigException):
                Settings(**overrides)

    def test_derived_options(self):
        settings = Settings(eps_feas=1e-8, refine_levels=3)
        self.assertEqual(settings.lp_options().eps_feas, 1e-8)
        self.assertEqual(settings.cert_options().refine_levels, 3)
        self.assertEqual(set(settings.tolerances()), {"eps_pd", "eps_feas", "pivot_tol", "opt_tol"})


class TestConeDualBase(unittest.TestCase):
    def test_check_dim(self):
        base = ConeDualBase(Settings(max_dim=2))
        base.check_dim(2)
        with self.assertRaises(ConeDualConfigException):
            base.check_dim(3)

    def test_solver_failure(self):
        base = ConeDualBase(Settings(max_iterations=1))
        program = LinearProgram.build(
            Sense.MAX, [1.0, 1.0], [([1.0, 2.0], Relation.LE, 4.0), ([3.0, 1.0], Relation.LE, 6.0)], lower=[0.0, 0.0]
        )
        with self.assertRaises(SolverFailureException):
            base.solve_lp(program, "textbook")

    def test_map_keeps_order(self):
        base = ConeDualBase(Settings(workers=4))
        self.assertEqual(base.map(lambda x: x * x, range(10)), [x * x for x in range(10)])


if __name__ == "__main__":
    unittest.main()
