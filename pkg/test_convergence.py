"""
Module for testing models/convergence.py
"""

import math
import unittest

import numpy as np

from models.cone_space import euclidean_origin
from models.convergence import (ExperimentConfig, TightnessSpec,
                                build_empirical_pp,
                                complete_convergence_experiment,
                                count_covariance, finite_n_mean,
                                integral_law_test, poisson_count_test,
                                tightness_diagnostic, tightness_thresholds)
from models.errors import InputError
from models.laplace import StepFunction
from models.measures import (AtomicMeasure, HomogeneousMeasure, TailSet,
                             atomic_mass)
from models.prm import PrmSpec, sample_replicates
from models.regvar import HeavyTailSampler, RadialLaw, sample_vector
from models.report import SCHEMA
from workers import rng_stream

LINE = euclidean_origin(1)
LN2 = math.log(2.0)


def toy_measure():
    return HomogeneousMeasure(LINE, 1.0, [[1.0]], [1.0])


def pareto():
    return HeavyTailSampler.from_measure(toy_measure())


class EmpiricalPointProcessTestCase(unittest.TestCase):
    def test_single_sample(self):
        n = build_empirical_pp([[2.0]], 1.0, LINE)
        self.assertEqual(n.atoms, [((1.0, 2.0), 1.0)])
        self.assertTrue(n.space.has_time)

    def test_time_coordinates(self):
        n = build_empirical_pp([[1.0], [2.0], [3.0]], 1.0, LINE)
        np.testing.assert_array_equal(n.locations[:, 0], [1 / 3, 2 / 3, 1.0])

    def test_doubling_b_halves_coordinates(self):
        samples = [[1.0], [-4.0]]
        a = build_empirical_pp(samples, 1.0, LINE)
        b = build_empirical_pp(samples, 2.0, LINE)
        np.testing.assert_array_equal(b.locations[:, 1],
                                      a.locations[:, 1] / 2)

    def test_invalid_b(self):
        with self.assertRaises(InputError):
            build_empirical_pp([[1.0]], 0.0, LINE)


class PoissonCountTestCase(unittest.TestCase):
    """
    Test case for the Poisson goodness-of-fit test.
    """

    def test_degenerate_match(self):
        test = poisson_count_test(np.zeros(1000, dtype=int), 1e-9)
        self.assertAlmostEqual(test.p_value, 1.0)

    def test_constant_counts_fail(self):
        test = poisson_count_test(np.ones(100000, dtype=int), 1.0)
        self.assertLess(test.p_value, 1e-6)
        self.assertLess(test.var_z, -100)

    def test_calibration(self):
        passes = 0
        for trial in range(100):
            counts = rng_stream(77, trial).poisson(1.0, size=10000)
            if poisson_count_test(counts, 1.0).p_value > 1e-3:
                passes += 1
        self.assertGreaterEqual(passes, 99)

    def test_bins_expect_at_least_five(self):
        counts = rng_stream(1, 0).poisson(2.0, size=500)
        test = poisson_count_test(counts, 2.0)
        self.assertGreaterEqual(min(test.expected), 5.0)
        self.assertAlmostEqual(sum(test.expected), 500.0)
        self.assertEqual(sum(test.observed), 500)
        self.assertTrue(0.0 <= test.p_value <= 1.0)

    def test_too_few_counts(self):
        with self.assertRaises(InputError):
            poisson_count_test([0] * 99, 1.0)


class FiniteNTestCase(unittest.TestCase):
    def test_exact_pareto_mean(self):
        A = TailSet(1.0, time_window=(0.0, 1.0))
        for n in (1, 10, 100):
            self.assertAlmostEqual(finite_n_mean(pareto(), A, n, float(n)),
                                   1.0)

    def test_window_counts_indices(self):
        A = TailSet(2.0, time_window=(0.0, 0.5))
        self.assertAlmostEqual(finite_n_mean(pareto(), A, 10, 10.0), 0.25)

    def test_mean_count_matches(self):
        n, u = 50, 2.0
        A = TailSet(u, time_window=(0.0, 1.0))
        counts = []
        for k in range(2000):
            samples = sample_vector(pareto(), 8, n, (k,))
            counts.append(atomic_mass(build_empirical_pp(samples, n, LINE),
                                      A))
        error = np.std(counts, ddof=1) / math.sqrt(len(counts))
        self.assertLess(abs(np.mean(counts) - 1.0 / u), 4 * error)

    def test_disjoint_windows_are_uncorrelated(self):
        n = 100
        early = TailSet(1.0, time_window=(0.0, 0.5))
        late = TailSet(1.0, time_window=(0.5, 1.0))
        x, y = [], []
        for k in range(2000):
            measure = build_empirical_pp(
                sample_vector(pareto(), 9, n, (k,)), n, LINE)
            x.append(atomic_mass(measure, early))
            y.append(atomic_mass(measure, late))
        covariance, error = count_covariance(x, y)
        self.assertLess(abs(covariance), 4 * error)


class TightnessTestCase(unittest.TestCase):
    """
    Test case for the tightness diagnostics.
    """

    def test_prm_ensemble_passes(self):
        mean = toy_measure()
        r_grid = [4.0, 2.0, 1.0]
        m_grid = tightness_thresholds(mean, r_grid, 1e-6)
        ensemble = sample_replicates(PrmSpec(mean, 1.0), 12, 1000)
        table = tightness_diagnostic(ensemble, r_grid, m_grid, 1e6, 0.01)
        self.assertTrue(table.passed)
        for row in table.rows:
            self.assertLess(row.tight1_fraction, 0.01)

    def test_fixed_threshold(self):
        ensemble = sample_replicates(PrmSpec(toy_measure(), 1.0), 14, 1000)
        table = tightness_diagnostic(ensemble, [1.0], [10.0], 1e6, 0.01)
        self.assertEqual(table.rows[0].tight1_fraction, 0.0)

    def test_mass_escaping_to_the_cone_fails(self):
        r_grid = [1.0, 0.5, 0.25]
        ensemble = [
            AtomicMeasure(LINE, np.full((10 * (k + 1), 1), 0.3),
                          np.ones(10 * (k + 1)))
            for k in range(20)]
        table = tightness_diagnostic(ensemble, r_grid, [5.0, 5.0, 5.0], 1e6,
                                     0.01)
        self.assertFalse(table.passed)
        self.assertFalse(table.rows[-1].tight1_ok)
        self.assertTrue(table.rows[0].tight1_ok)

    def test_empty_ensemble_members(self):
        ensemble = [AtomicMeasure.empty(LINE)] * 10
        table = tightness_diagnostic(ensemble, [2.0, 1.0], [1.0, 1.0], 10.0,
                                     0.01)
        for row in table.rows:
            self.assertEqual(row.tight1_fraction, 0.0)
            self.assertEqual(row.tight2_fraction, 0.0)

    def test_large_box_holds_everything(self):
        ensemble = sample_replicates(PrmSpec(toy_measure(), 1.0), 15, 200)
        table = tightness_diagnostic(ensemble, [1.0], [100.0], 1e300, 0.01)
        self.assertEqual(table.rows[0].tight2_fraction, 0.0)

    def test_small_box_loses_mass(self):
        ensemble = [AtomicMeasure(LINE, [[50.0]], [1.0])] * 10
        table = tightness_diagnostic(ensemble, [1.0], [100.0], 10.0, 0.01)
        self.assertEqual(table.rows[0].tight2_fraction, 1.0)

    def test_invalid_grids(self):
        with self.assertRaises(InputError):
            tightness_diagnostic([], [1.0], [1.0, 2.0], 1.0, 0.01)
        with self.assertRaises(InputError):
            TightnessSpec((1.0, 2.0), (1.0, 1.0), 1.0, 0.01)


class LawTestTestCase(unittest.TestCase):
    def test_same_law(self):
        a = rng_stream(5, 0).poisson(1.0, size=2000)
        b = rng_stream(5, 1).poisson(1.0, size=2000)
        self.assertGreater(integral_law_test(a, b).p_value, 1e-3)

    def test_different_law(self):
        a = rng_stream(5, 0).poisson(1.0, size=2000)
        b = rng_stream(5, 1).poisson(2.0, size=2000)
        self.assertLess(integral_law_test(a, b).p_value, 1e-6)


class CompleteConvergenceTestCase(unittest.TestCase):
    """
    Test case for the complete convergence experiment.
    """

    def config(self, sampler, **kwargs):
        window = (0.0, 1.0)
        settings = dict(
            sampler=sampler,
            n_grid=(10, 100, 1000),
            reps=400,
            test_functions=(StepFunction(
                ((TailSet(1.0, time_window=window), LN2),)),),
            tail_sets=(TailSet(1.0, time_window=window),
                       TailSet(2.0, time_window=(0.0, 0.5))),
            seed=2024)
        settings.update(kwargs)
        return ExperimentConfig(**settings)

    def test_pareto_passes(self):
        cfg = self.config(pareto(), law_test=True,
                          tightness=TightnessSpec((4.0, 2.0, 1.0),
                                                  (12.0, 12.0, 12.0), 1e6,
                                                  0.05))
        report = complete_convergence_experiment(cfg)
        self.assertTrue(report.passed, report.failures)
        self.assertEqual(report.schema, SCHEMA)
        self.assertEqual(len(report.laplace_rows), 3)
        self.assertEqual(len(report.count_rows), 6)
        self.assertEqual(len(report.law_rows), 1)
        self.assertEqual(len(report.tightness_rows), 3)
        for row in report.laplace_rows:
            self.assertAlmostEqual(row.target, math.exp(-0.5))
        targets = [row.target for row in report.count_rows[:2]]
        self.assertAlmostEqual(targets[0], 1.0)
        self.assertAlmostEqual(targets[1], 0.25)
        for row in report.count_rows:
            if row.set_index == 0:
                self.assertAlmostEqual(row.finite_target, 1.0)
            self.assertTrue(0.0 <= row.p_value <= 1.0)

    def test_log_perturbed_bias_is_visible_and_shrinks(self):
        sampler = HeavyTailSampler.from_measure(
            toy_measure(), RadialLaw.LOG_PERTURBED, 1.0)
        window = (0.0, 1.0)
        A = TailSet(2.0, time_window=window)
        report = complete_convergence_experiment(self.config(
            sampler, n_grid=(10, 1000), reps=2000,
            test_functions=(StepFunction(((A, LN2),)),), tail_sets=(A,)))
        small, large = report.count_rows
        self.assertGreater(abs(small.finite_target - small.target),
                           abs(large.finite_target - large.target))
        first = report.laplace_rows[0]
        self.assertLess(first.estimate, first.target)

    def test_reproducible(self):
        cfg = self.config(pareto(), n_grid=(50,), reps=100)
        a = complete_convergence_experiment(cfg)
        b = complete_convergence_experiment(cfg)
        self.assertEqual(a, b)

    def test_wrong_scaling_fails(self):
        sampler = HeavyTailSampler.from_measure(
            toy_measure(), RadialLaw.LOG_PERTURBED, 3.0)
        report = complete_convergence_experiment(
            self.config(sampler, n_grid=(10,), reps=200, scaling="analytic"))
        self.assertFalse(report.passed)
        self.assertTrue(report.failures)

    def test_config_validation(self):
        with self.assertRaises(InputError):
            self.config(pareto(), reps=50)
        with self.assertRaises(InputError):
            self.config(pareto(), tail_sets=(
                TailSet(1.0, time_window=(0.5, 2.0)),))
        with self.assertRaises(InputError):
            self.config(pareto(), n_grid=())


if __name__ == '__main__':
    unittest.main()
