"""
This module contains the Prohorov distance between finite atomic measures
and the d_{M_O} metric built from it.

The Prohorov distance between finite measures is

    inf{eps : mu(A) <= nu(A^eps) + eps and nu(A) <= mu(A^eps) + eps}

over closed A, with A^eps the closed eps-neighbourhood. For atomic
measures the worst set deficiency max_A [mu(A) - nu(A^eps)] equals the
mass of mu that cannot be routed to nu through edges of length <= eps,
which is a bipartite max-flow.
"""

import itertools
import logging
import math
from typing import NamedTuple

import networkx as nx
import numpy as np
from networkx.algorithms.flow import edmonds_karp
from scipy import integrate

from models.cone_space import pairwise_distances
from models.errors import InputError
from models.measures import restrict
from workers import pool

logger = logging.getLogger(__name__)

FLOW_TOLERANCE = 1e-12
BRUTEFORCE_LIMIT = 16


class ProhorovResult(NamedTuple):
    value: float
    witness_epsilon_breakpoints: tuple


def _check_same_space(mu, nu):
    if mu.space != nu.space:
        raise InputError("measures live on different spaces")


def _snap(deficiency):
    return 0.0 if deficiency <= FLOW_TOLERANCE else float(deficiency)


def _breakpoints(distances):
    return np.unique(np.concatenate(([0.0], distances.ravel())))


def _deficiency(mu_weights, nu_weights, reachable):
    """
    mu-mass that cannot reach nu: total mu mass minus the max flow of
    source -> mu atoms -> nu atoms -> sink.
    """
    total = math.fsum(mu_weights)
    if len(nu_weights) == 0 or not reachable.any():
        return _snap(total)
    graph = nx.DiGraph()
    for i, w in enumerate(mu_weights):
        graph.add_edge("source", ("mu", i), capacity=float(w))
    for j, w in enumerate(nu_weights):
        graph.add_edge(("nu", j), "sink", capacity=float(w))
    # edges without a capacity attribute are uncapacitated
    for i, j in zip(*np.nonzero(reachable)):
        graph.add_edge(("mu", int(i)), ("nu", int(j)))
    flow = nx.maximum_flow_value(graph, "source", "sink",
                                 flow_func=edmonds_karp)
    return _snap(total - flow)


def _smallest_feasible(breakpoints, deficiency_at):
    """
    inf{eps : F(eps) <= eps} for F nonincreasing and constant on each
    [d_k, d_{k+1}); interval k is feasible when F(d_k) < d_{k+1}, and
    feasibility is monotone in k, so the first feasible one is bisected.
    """
    lo, hi = 0, len(breakpoints) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if deficiency_at(breakpoints[mid]) < breakpoints[mid + 1]:
            hi = mid
        else:
            lo = mid + 1
    return max(float(breakpoints[lo]), deficiency_at(breakpoints[lo]))


def prohorov_distance(mu, nu):
    """
    Exact Prohorov distance between two finite atomic measures.

    Args:
        mu (AtomicMeasure): First measure.
        nu (AtomicMeasure): Second measure, same space.

    Returns:
        ProhorovResult: The distance and the breakpoints examined.

    Raises:
        InputError: If the measures live on different spaces.
    """
    _check_same_space(mu, nu)
    mu, nu = mu.canonical(), nu.canonical()
    distances = pairwise_distances(mu.space, mu.locations, nu.locations)
    breakpoints = _breakpoints(distances)
    cache = {}

    def deficiency_at(eps):
        if eps not in cache:
            reachable = distances <= eps
            cache[eps] = max(
                _deficiency(mu.weights, nu.weights, reachable),
                _deficiency(nu.weights, mu.weights, reachable.T))
        return cache[eps]

    value = _smallest_feasible(breakpoints, deficiency_at)
    logger.debug("prohorov: %d x %d atoms, %d breakpoints, %d flows",
                 len(mu), len(nu), len(breakpoints), len(cache))
    return ProhorovResult(value, tuple(breakpoints.tolist()))


def _subset_deficiency(weights_a, weights_b, reachable, subsets):
    worst = 0.0
    for subset in subsets:
        covered = reachable[list(subset)].any(axis=0)
        gap = (math.fsum(weights_a[list(subset)])
               - math.fsum(weights_b[covered]))
        worst = max(worst, gap)
    return _snap(worst)


def prohorov_bruteforce(mu, nu):
    """
    Prohorov distance by enumerating every subset of each support as the
    candidate closed set A. Independent check of ``prohorov_distance``.

    Raises:
        InputError: With more than 16 atoms in total.
    """
    _check_same_space(mu, nu)
    mu, nu = mu.canonical(), nu.canonical()
    if len(mu) + len(nu) > BRUTEFORCE_LIMIT:
        raise InputError(
            f"brute force refuses more than {BRUTEFORCE_LIMIT} atoms")
    distances = pairwise_distances(mu.space, mu.locations, nu.locations)
    breakpoints = _breakpoints(distances)
    mu_subsets = [s for k in range(1, len(mu) + 1)
                  for s in itertools.combinations(range(len(mu)), k)]
    nu_subsets = [s for k in range(1, len(nu) + 1)
                  for s in itertools.combinations(range(len(nu)), k)]
    for k, eps in enumerate(breakpoints):
        reachable = distances <= eps
        deficiency = max(
            _subset_deficiency(mu.weights, nu.weights, reachable,
                               mu_subsets),
            _subset_deficiency(nu.weights, mu.weights, reachable.T,
                               nu_subsets))
        upper = breakpoints[k + 1] if k + 1 < len(breakpoints) else math.inf
        if deficiency < upper:
            return max(float(eps), deficiency)
    raise AssertionError("last breakpoint interval is always feasible")


def _segments(mu, nu):
    """Cone-distance breakpoints 0 = r_0 < r_1 < ... < r_m."""
    return np.unique(np.concatenate(
        ([0.0], mu.cone_distances, nu.cone_distances)))


def mo_integrand(mu, nu, r):
    """e^-r p_r / (1 + p_r) at a single radius r > 0."""
    p = prohorov_distance(restrict(mu, r), restrict(nu, r)).value
    return math.exp(-r) * p / (1.0 + p)


def mo_distance(mu, nu):
    """
    d_{M_O}(mu, nu) integrated exactly segment by segment.

    On (r_j, r_{j+1}] both restrictions are constant, so the Prohorov
    distance there is the one between the restrictions at r_{j+1}.
    Beyond the largest cone distance both restrictions are empty.
    """
    _check_same_space(mu, nu)
    radii = _segments(mu, nu)

    def segment(j):
        lo, hi = radii[j], radii[j + 1]
        p = prohorov_distance(restrict(mu, hi), restrict(nu, hi)).value
        return (p / (1.0 + p)) * (math.exp(-lo) - math.exp(-hi))

    contributions = pool.map(segment, range(len(radii) - 1))
    return math.fsum(contributions)


def mo_distance_quadrature(mu, nu):
    """
    d_{M_O}(mu, nu) by adaptive quadrature, split at the breakpoints.
    """
    _check_same_space(mu, nu)
    radii = _segments(mu, nu)
    total = 0.0
    for lo, hi in zip(radii[:-1], radii[1:]):
        value, _ = integrate.quad(lambda r: mo_integrand(mu, nu, r), lo, hi,
                                  epsabs=1e-10, epsrel=1e-10)
        total += value
    return total
