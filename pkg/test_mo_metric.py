"""
Module for testing models/mo_metric.py
"""

import math
import unittest

import numpy as np

from models.cone_space import euclidean_origin, make_product_space
from models.errors import InputError
from models.measures import AtomicMeasure
from models.mo_metric import (mo_distance, mo_distance_quadrature,
                              mo_integrand, prohorov_bruteforce,
                              prohorov_distance)

LINE = euclidean_origin(1)


def dirac(x, w=1.0, space=LINE):
    return AtomicMeasure.from_atoms(space, [((x,), w)])


def random_measure(rng, space, max_atoms=6, integer=False):
    count = int(rng.integers(0, max_atoms + 1))
    # a small grid makes coinciding atoms and tied distances common
    locations = rng.integers(1, 6, size=(count, space.dim)) / 2.0
    if integer:
        weights = rng.integers(1, 4, size=count).astype(float)
    else:
        weights = rng.uniform(0.05, 2.0, size=count)
    return AtomicMeasure(space, locations, weights)


class ProhorovTestCase(unittest.TestCase):
    """
    Test case for the Prohorov distance and its brute-force oracle.
    """

    def test_identity(self):
        m = dirac(1.0)
        self.assertEqual(prohorov_distance(m, m).value, 0.0)

    def test_close_atoms(self):
        self.assertEqual(prohorov_distance(dirac(1.0), dirac(1.5)).value, 0.5)

    def test_extra_mass(self):
        self.assertEqual(prohorov_distance(dirac(1.0, 2.0), dirac(1.0)).value,
                         1.0)

    def test_far_atoms(self):
        self.assertEqual(prohorov_distance(dirac(1.0), dirac(2.0)).value, 1.0)
        self.assertEqual(prohorov_bruteforce(dirac(1.0), dirac(2.0)), 1.0)

    def test_empty(self):
        empty = AtomicMeasure.empty(LINE)
        self.assertEqual(prohorov_distance(empty, empty).value, 0.0)
        self.assertEqual(prohorov_bruteforce(empty, empty), 0.0)
        self.assertEqual(prohorov_distance(dirac(1.0), empty).value, 1.0)
        self.assertEqual(prohorov_bruteforce(dirac(1.0), empty), 1.0)

    def test_symmetric(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            mu = random_measure(rng, euclidean_origin(2))
            nu = random_measure(rng, euclidean_origin(2))
            self.assertEqual(prohorov_distance(mu, nu).value,
                             prohorov_distance(nu, mu).value)

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(2024)
        mismatches = 0
        for trial in range(500):
            space = euclidean_origin(1 + trial % 2)
            integer = trial % 3 == 0
            mu = random_measure(rng, space, integer=integer)
            nu = random_measure(rng, space, integer=integer)
            fast = prohorov_distance(mu, nu).value
            slow = prohorov_bruteforce(mu, nu)
            if not math.isclose(fast, slow, rel_tol=0, abs_tol=1e-9):
                mismatches += 1
        self.assertEqual(mismatches, 0)

    def test_breakpoints_reported(self):
        result = prohorov_distance(dirac(1.0), dirac(1.5))
        self.assertEqual(result.witness_epsilon_breakpoints, (0.0, 0.5))

    def test_bruteforce_limit(self):
        big = AtomicMeasure(LINE, np.arange(1, 10)[:, None],
                            np.ones(9))
        with self.assertRaises(InputError):
            prohorov_bruteforce(big, big)

    def test_different_spaces(self):
        other = AtomicMeasure.from_atoms(make_product_space(LINE),
                                         [((0.5, 1.0), 1.0)])
        with self.assertRaises(InputError):
            prohorov_distance(dirac(1.0), other)


class MoDistanceTestCase(unittest.TestCase):
    """
    Test case for the d_{M_O} metric.
    """

    def test_identity(self):
        m = AtomicMeasure.from_atoms(LINE, [((1.0,), 1.0), ((-2.0,), 3.0)])
        self.assertEqual(mo_distance(m, m), 0.0)

    def test_single_atom_against_empty(self):
        value = mo_distance(dirac(2.0), AtomicMeasure.empty(LINE))
        self.assertAlmostEqual(value, (1 - math.exp(-2)) / 2, places=12)
        self.assertAlmostEqual(value, 0.43233, places=5)

    def test_two_close_atoms(self):
        expected = ((1 - math.exp(-1)) * (0.2 / 1.2)
                    + (math.exp(-1) - math.exp(-1.2)) * 0.5)
        value = mo_distance(dirac(1.0), dirac(1.2))
        self.assertAlmostEqual(value, expected, places=12)
        self.assertAlmostEqual(value, 0.13871, places=5)

    def test_integrand(self):
        self.assertAlmostEqual(mo_integrand(dirac(1.0), dirac(1.2), 1.1),
                               math.exp(-1.1) * 0.5)

    def test_matches_quadrature(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            mu = random_measure(rng, LINE, max_atoms=4)
            nu = random_measure(rng, LINE, max_atoms=4)
            self.assertAlmostEqual(mo_distance(mu, nu),
                                   mo_distance_quadrature(mu, nu),
                                   delta=1e-6)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(3)
        space = euclidean_origin(2)
        for _ in range(100):
            a, b, c = (random_measure(rng, space, max_atoms=4)
                       for _ in range(3))
            self.assertLessEqual(mo_distance(a, c),
                                 mo_distance(a, b) + mo_distance(b, c)
                                 + 1e-9)

    def test_converging_atoms(self):
        values = [mo_distance(dirac(1.0 + 1.0 / n), dirac(1.0))
                  for n in (1, 10, 100, 1000, 10000)]
        for before, after in zip(values, values[1:]):
            self.assertLess(after, before)
        self.assertLess(values[-1], 1e-3)

    def test_bounded_by_one(self):
        heavy = dirac(5.0, 100.0)
        self.assertLess(mo_distance(heavy, AtomicMeasure.empty(LINE)), 1.0)


if __name__ == '__main__':
    unittest.main()
