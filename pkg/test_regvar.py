"""
Module for testing models/regvar.py
"""

import math
import unittest

import numpy as np

from models.cone_space import cone_distance, euclidean_origin
from models.errors import InputError
from models.measures import (HomogeneousMeasure, TailSet, atomic_mass,
                             is_counting)
from models.regvar import (HeavyTailSampler, RadialLaw, ScalingFunction,
                           ScalingMode, empirical_tail_measure, finite_t_mass,
                           homogeneity_ratio, make_scaling, rv_check,
                           sample_vector, scaling_b)

LINE = euclidean_origin(1)


def pareto(alpha=1.0):
    limit = HomogeneousMeasure(LINE, alpha, [[1.0]], [1.0])
    return HeavyTailSampler.from_measure(limit)


def log_perturbed(alpha=1.0, gamma=1.0):
    limit = HomogeneousMeasure(LINE, alpha, [[1.0]], [1.0])
    return HeavyTailSampler.from_measure(limit, RadialLaw.LOG_PERTURBED, gamma)


class SamplerTestCase(unittest.TestCase):
    """
    Test case for the heavy-tailed samplers.
    """

    def test_pareto_tail_frequency(self):
        draws = sample_vector(pareto(), 1, 100000)
        frequency = np.mean(draws[:, 0] > 2.0)
        self.assertLess(abs(frequency - 0.5),
                        3 * math.sqrt(0.25 / 100000))

    def test_radial_support(self):
        draws = sample_vector(log_perturbed(gamma=2.0), 2, 10000)
        self.assertTrue(np.all(cone_distance(LINE, draws) >= 1.0))

    def test_degenerate_angular_weights(self):
        limit = HomogeneousMeasure(euclidean_origin(2), 1.0,
                                   [[1.0, 0.0], [0.0, 1.0]], [1.0, 1e-300])
        draws = sample_vector(HeavyTailSampler.from_measure(limit), 3, 1000)
        self.assertTrue(np.all(draws[:, 1] == 0.0))

    def test_streams_are_reproducible(self):
        s = pareto()
        np.testing.assert_array_equal(sample_vector(s, 5, 10, (1, 2)),
                                      sample_vector(s, 5, 10, (1, 2)))

    def test_log_perturbed_quantile_inverts_tail(self):
        for gamma in (0.5, 1.0, 3.0):
            s = log_perturbed(gamma=gamma)
            for p in (0.5, 1e-2, 1e-5):
                self.assertAlmostEqual(s.tail(s.quantile(p)) / p, 1.0,
                                       places=9)

    def test_tail_is_capped(self):
        s = log_perturbed(alpha=1.0, gamma=3.0)
        self.assertEqual(s.tail(1.5), 1.0)
        self.assertEqual(s.tail(0.5), 1.0)

    def test_quantile_range(self):
        with self.assertRaises(InputError):
            pareto().quantile(0.0)


class ScalingTestCase(unittest.TestCase):
    def test_analytic(self):
        self.assertEqual(scaling_b(ScalingFunction.analytic(1.0), 100), 100)
        self.assertAlmostEqual(scaling_b(ScalingFunction.analytic(2.0), 100),
                               10.0)

    def test_exact_quantile_for_pareto(self):
        sf = make_scaling(pareto(2.0), ScalingMode.QUANTILE)
        self.assertAlmostEqual(sf(100), 10.0)

    def test_default_modes(self):
        self.assertIs(make_scaling(pareto()).mode, ScalingMode.ANALYTIC)
        self.assertIs(make_scaling(log_perturbed()).mode, ScalingMode.QUANTILE)

    def test_empirical_quantile(self):
        passes = 0
        for k in range(20):
            samples = sample_vector(pareto(), 11, 100000, (k,))
            sf = make_scaling(pareto(), ScalingMode.EMPIRICAL_QUANTILE,
                              samples)
            if all(abs(sf(t) / t - 1.0) <= 0.1 for t in (10, 100)):
                passes += 1
        self.assertGreaterEqual(passes, 18)

    def test_scale_below_one(self):
        with self.assertRaises(InputError):
            scaling_b(ScalingFunction.analytic(1.0), 0.5)


class EmpiricalTailMeasureTestCase(unittest.TestCase):
    def test_total_mass_is_t(self):
        s = pareto()
        samples = sample_vector(s, 4, 5000)
        measure = empirical_tail_measure(samples, 50.0, make_scaling(s),
                                         LINE)
        self.assertAlmostEqual(measure.total_mass, 50.0, places=9)

    def test_t_equal_to_sample_count(self):
        s = pareto()
        samples = sample_vector(s, 4, 200)
        measure = empirical_tail_measure(samples, 200.0, make_scaling(s),
                                         LINE)
        self.assertTrue(is_counting(measure))

    def test_single_sample(self):
        measure = empirical_tail_measure([[4.0]], 2.0,
                                         ScalingFunction.analytic(1.0), LINE)
        self.assertEqual(measure.atoms, [((2.0,), 2.0)])

    def test_expected_mass(self):
        s = pareto()
        t, u = 100.0, 2.0
        masses = []
        for k in range(200):
            samples = sample_vector(s, 6, 2000, (k,))
            measure = empirical_tail_measure(samples, t, make_scaling(s),
                                             LINE)
            masses.append(atomic_mass(measure, TailSet(u)))
        error = np.std(masses, ddof=1) / math.sqrt(len(masses))
        self.assertLess(abs(np.mean(masses) - 1.0 / u), 4 * error)

    def test_finite_t_mass(self):
        s = pareto()
        self.assertAlmostEqual(
            finite_t_mass(s, TailSet(2.0), 100.0, make_scaling(s)), 0.5)
        with self.assertRaises(InputError):
            finite_t_mass(s, TailSet(2.0, time_window=(0, 1)), 100.0,
                          make_scaling(s))


class RvCheckTestCase(unittest.TestCase):
    """
    Test case for the regular-variation check.
    """

    def test_pareto_passes(self):
        sets = [TailSet(1.0), TailSet(2.0), TailSet(0.5, 2.0), TailSet(4.0)]
        report = rv_check(pareto(), None, [100, 1000], sets, reps=100,
                          seed=1, sample_size=20000)
        self.assertTrue(report.passed, report.failures)
        self.assertEqual(len(report.tail_rows), 8)
        for row in report.tail_rows:
            self.assertGreaterEqual(row.std_error, 0.0)
            self.assertAlmostEqual(row.target, row.finite_target)

    def test_log_perturbed_finite_targets(self):
        s = log_perturbed(gamma=1.0)
        report = rv_check(s, None, [10, 1000], [TailSet(2.0)], reps=100,
                          seed=2, sample_size=20000)
        for row in report.tail_rows:
            self.assertLess(abs(row.z_finite), 4.0)
        small_t, large_t = report.tail_rows
        self.assertLess(abs(large_t.finite_target - large_t.target),
                        abs(small_t.finite_target - small_t.target))

    def test_needs_two_replicates(self):
        with self.assertRaises(InputError):
            rv_check(pareto(), None, [10], [TailSet(1.0)], reps=1, seed=0)

    def test_homogeneity_ratio(self):
        estimate = homogeneity_ratio(pareto(), TailSet(1.0), 2.0, 100.0,
                                     reps=200, seed=3, sample_size=5000)
        self.assertEqual(estimate.target, 0.5)
        self.assertLess(abs(estimate.z), 4.0)


if __name__ == '__main__':
    unittest.main()
