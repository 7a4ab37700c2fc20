"""
Module for testing schemas.py
"""

import math
import unittest

from marshmallow import ValidationError

from models.cone_space import SpaceKind
from models.convergence import ExperimentConfig
from models.laplace import RampFunction, StepFunction
from models.measures import AtomicMeasure, TailSet
from models.regvar import RadialLaw
from models.report import SCHEMA, ConvergenceReport
from schemas import (ExperimentConfigSchema, HomogeneousMeasureSchema,
                     MeasureSchema, PlainExperimentConfigSchema,
                     ReportSchema, SamplerSchema, TailSetSchema,
                     TestFunctionSchema)

CONFIG = {
    "sampler": {"alpha": 1.0},
    "n_grid": [10, 100],
    "reps": 200,
    "test_functions": [{"form": "step", "time": [0.0, 1.0],
                        "pieces": [{"u_lo": 1.0, "c": 0.6931}]}],
    "tail_sets": [{"u_lo": 1.0, "time": [0.0, 1.0]}],
    "tightness": {"r_grid": [2.0, 1.0], "box_bound": 1e6},
}


class MeasureSchemaTestCase(unittest.TestCase):
    def test_load(self):
        measure = MeasureSchema().load({
            "space": {"kind": "euclidean-axes", "dim": 2},
            "atoms": [{"x": [1.0, 2.0], "w": 0.5}]})
        self.assertIsInstance(measure, AtomicMeasure)
        self.assertIs(measure.space.kind, SpaceKind.EUCLIDEAN_AXES)
        self.assertEqual(measure.atoms, [((1.0, 2.0), 0.5)])

    def test_dump(self):
        document = {"space": {"kind": "euclidean-origin", "dim": 1,
                              "time": True},
                    "atoms": [{"x": [0.5, 2.0], "w": 1.0}]}
        measure = MeasureSchema().load(document)
        self.assertTrue(measure.space.has_time)
        self.assertEqual(MeasureSchema().dump(measure), document)

    def test_atoms_default_to_empty(self):
        measure = MeasureSchema().load({"space": {}})
        self.assertEqual(len(measure), 0)

    def test_atom_on_the_cone(self):
        with self.assertRaises(ValidationError):
            MeasureSchema().load({"space": {},
                                  "atoms": [{"x": [0.0], "w": 1.0}]})

    def test_nonpositive_weight(self):
        with self.assertRaises(ValidationError):
            MeasureSchema().load({"space": {},
                                  "atoms": [{"x": [1.0], "w": 0.0}]})

    def test_unknown_key(self):
        with self.assertRaises(ValidationError):
            MeasureSchema().load({"space": {}, "points": []})


class SamplerSchemaTestCase(unittest.TestCase):
    def test_defaults(self):
        sampler = SamplerSchema().load({"alpha": 2.0})
        self.assertEqual(sampler.alpha, 2.0)
        self.assertIs(sampler.radial_law, RadialLaw.PURE_PARETO)
        self.assertEqual(sampler.space.dim, 1)

    def test_log_perturbed(self):
        sampler = SamplerSchema().load({"alpha": 1.0,
                                        "radial": "log-perturbed",
                                        "gamma": 3.0})
        self.assertIs(sampler.radial_law, RadialLaw.LOG_PERTURBED)
        self.assertEqual(sampler.gamma, 3.0)

    def test_limit_with_time_axis(self):
        with self.assertRaises(ValidationError):
            HomogeneousMeasureSchema().load({"alpha": 1.0,
                                             "space": {"time": True}})

    def test_unknown_radial_law(self):
        with self.assertRaises(ValidationError):
            SamplerSchema().load({"alpha": 1.0, "radial": "weibull"})


class TestFunctionSchemaTestCase(unittest.TestCase):
    def test_tail_set_upper_bound(self):
        self.assertEqual(TailSetSchema().load({"u_lo": 1.0}).u_hi, math.inf)
        self.assertEqual(TailSetSchema().load({"u_lo": 1.0, "u_hi": 3.0}),
                         TailSet(1.0, 3.0))

    def test_step_window_applies_to_pieces(self):
        f = TestFunctionSchema().load({
            "form": "step", "time": [0.0, 0.5],
            "pieces": [{"u_lo": 1.0, "u_hi": 2.0, "c": 1.0},
                       {"u_lo": 2.0, "c": 2.0, "time": [0.0, 1.0]}]})
        self.assertIsInstance(f, StepFunction)
        windows = [A.time_window for A, _ in f.pieces]
        self.assertEqual(windows, [(0.0, 0.5), (0.0, 1.0)])

    def test_ramp(self):
        f = TestFunctionSchema().load({"form": "ramp", "c": 1.0, "r": 1.0,
                                       "w": 0.5})
        self.assertIsInstance(f, RampFunction)
        self.assertEqual(f.vanish_radius, 1.0)

    def test_incomplete_ramp(self):
        with self.assertRaises(ValidationError):
            TestFunctionSchema().load({"form": "ramp", "c": 1.0})

    def test_step_without_pieces(self):
        with self.assertRaises(ValidationError):
            TestFunctionSchema().load({"form": "step"})


class ExperimentConfigSchemaTestCase(unittest.TestCase):
    """
    Test case for loading experiment configurations.
    """

    def test_load(self):
        cfg = ExperimentConfigSchema().load(CONFIG)
        self.assertIsInstance(cfg, ExperimentConfig)
        self.assertEqual(tuple(cfg.n_grid), (10, 100))
        self.assertEqual(cfg.seed, 0)
        self.assertFalse(cfg.law_test)
        self.assertIsNotNone(cfg.test_functions[0].reference)
        self.assertEqual(cfg.tail_sets[0].time_window, (0.0, 1.0))

    def test_thresholds_from_level(self):
        cfg = ExperimentConfigSchema().load(CONFIG)
        m_grid = list(cfg.tightness.m_grid)
        self.assertEqual(len(m_grid), 2)
        self.assertLessEqual(m_grid[0], m_grid[1])

    def test_resolved_defaults(self):
        resolved = PlainExperimentConfigSchema().load(CONFIG)
        self.assertEqual(resolved["sampler"]["radial"], "pure-pareto")
        self.assertIsNone(resolved["scaling"])
        self.assertEqual(resolved["tightness"]["eps"], 0.01)

    def test_too_few_reps(self):
        with self.assertRaises(ValidationError):
            ExperimentConfigSchema().load(dict(CONFIG, reps=50))

    def test_unknown_scaling(self):
        with self.assertRaises(ValidationError):
            ExperimentConfigSchema().load(dict(CONFIG, scaling="median"))

    def test_unknown_key(self):
        with self.assertRaises(ValidationError):
            ExperimentConfigSchema().load(dict(CONFIG, replications=3))


class ReportSchemaTestCase(unittest.TestCase):
    def test_pass_key(self):
        report = ConvergenceReport(kind="complete-convergence")
        document = ReportSchema().dump(report)
        self.assertEqual(document["schema"], SCHEMA)
        self.assertIn("pass", document)
        self.assertNotIn("passed", document)


if __name__ == '__main__':
    unittest.main()
