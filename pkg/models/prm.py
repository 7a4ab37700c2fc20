"""
This module contains Poisson random measures with homogeneous mean
measures: sampling (directly and ring by ring), mapping and marking.
"""

import abc
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from models.cone_space import cone_distance, make_product_space
from models.errors import InputError, UnsupportedError
from models.measures import AtomicMeasure, HomogeneousMeasure
from workers import pool, rng_stream

logger = logging.getLogger(__name__)

PRM_STREAM = 0
MARK_STREAM = 1


@dataclass(frozen=True)
class PrmSpec:
    """
    Class representing PRM(mu) truncated to {cone_distance >= r_min},
    optionally on [0, T] x O with mean measure dt x mu.

    Attributes:
        mean (HomogeneousMeasure): The mean measure mu.
        r_min (float): Atoms closer to the cone are not generated.
        time_horizon (float): T, or None for a process on O alone.
    """

    mean: HomogeneousMeasure
    r_min: float
    time_horizon: Optional[float] = None

    def __post_init__(self):
        if not self.r_min > 0:
            raise InputError(f"r_min must be positive, got {self.r_min}")
        if self.time_horizon is not None and not self.time_horizon > 0:
            raise InputError("time horizon must be positive")

    @property
    def space(self):
        if self.time_horizon is None:
            return self.mean.space
        return make_product_space(self.mean.space)

    def region_mass(self, lo, hi=math.inf):
        """Mean count in {lo <= cone_distance < hi}."""
        alpha = self.mean.alpha
        upper = 0.0 if math.isinf(hi) else hi ** -alpha
        horizon = 1.0 if self.time_horizon is None else self.time_horizon
        return self.mean.total_weight * (lo ** -alpha - upper) * horizon

    @property
    def expected_count(self):
        return self.region_mass(self.r_min)


def _sample_region(spec, rng, lo, hi):
    """
    Poisson count for the region, radii by inverting the truncated
    radial law, directions proportional to the angular weights.
    """
    mean = spec.mean
    alpha = mean.alpha
    count = int(rng.poisson(spec.region_mass(lo, hi)))
    top = lo ** -alpha
    bottom = 0.0 if math.isinf(hi) else hi ** -alpha
    u = rng.random(count)
    radii = (top - u * (top - bottom)) ** (-1.0 / alpha)
    probs = mean.weights / mean.weights.sum()
    picks = rng.choice(len(probs), size=count, p=probs)
    points = mean.directions[picks] * radii[:, None]
    if spec.time_horizon is not None:
        times = rng.uniform(0.0, spec.time_horizon, size=count)
        points = np.column_stack((times, points))
    return points


def sample_prm(spec, seed, replicate=0):
    """
    Draw one realisation of the PRM above r_min.

    Args:
        spec (PrmSpec): The process.
        seed (int): Any 64-bit integer.
        replicate (int): Replicate index selecting an independent stream.

    Returns:
        AtomicMeasure: A counting measure with unit weights.
    """
    rng = rng_stream(seed, PRM_STREAM, replicate, 0)
    points = _sample_region(spec, rng, spec.r_min, math.inf)
    logger.debug("sampled %d atoms (expected %.6g)", len(points),
                 spec.expected_count)
    return AtomicMeasure(spec.space, points, np.ones(len(points)))


def ring_radii(r_min, rings, outer_radius=None):
    """
    Geometric radii r_1 > ... > r_rings = r_min.

    The default outer radius doubles r_min once per extra ring.
    """
    if rings < 1:
        raise InputError("at least one ring is required")
    if outer_radius is None:
        outer_radius = r_min * 2.0 ** (rings - 1)
    if outer_radius < r_min:
        raise InputError("outer radius must be at least r_min")
    if rings == 1:
        return np.array([float(r_min)])
    return outer_radius * (r_min / outer_radius) ** (
        np.arange(rings) / (rings - 1))


def sample_prm_annuli(spec, seed, rings, replicate=0, outer_radius=None):
    """
    Draw the PRM as a union of independent pieces: the outer region
    {cone_distance >= r_1} and the rings {r_{j+1} <= cone_distance < r_j}.

    Each piece has its own stream keyed by (seed, replicate, ring), so the
    result has the law of ``sample_prm``; with one ring it is exactly
    ``sample_prm``.
    """
    radii = ring_radii(spec.r_min, rings, outer_radius)
    pieces = [_sample_region(spec, rng_stream(seed, PRM_STREAM, replicate,
                                              0),
                             radii[0], math.inf)]
    for j in range(1, len(radii)):
        rng = rng_stream(seed, PRM_STREAM, replicate, j)
        pieces.append(_sample_region(spec, rng, radii[j], radii[j - 1]))
    points = np.vstack(pieces)
    return AtomicMeasure(spec.space, points, np.ones(len(points)))


def sample_replicates(spec, seed, reps, rings=None):
    """
    Independent realisations 0..reps-1, sampled in parallel.
    """
    if rings is None:
        return pool.map(lambda k: sample_prm(spec, seed, k), range(reps))
    return pool.map(lambda k: sample_prm_annuli(spec, seed, rings, k),
                    range(reps))


class PrmTransform(abc.ABC):
    """
    A map T with preimages of sets bounded away from the cone again bounded
    away from the cone, so that N o T^-1 is a PRM.
    """

    @abc.abstractmethod
    def apply(self, space, locations):
        """Image of each row of ``locations``."""

    @abc.abstractmethod
    def push_forward(self, mean):
        """The mapped mean measure mu o T^-1."""


@dataclass(frozen=True)
class ScaleBy(PrmTransform):
    factor: float

    def __post_init__(self):
        if not self.factor > 0:
            raise InputError("scale factor must be positive")

    def apply(self, space, locations):
        out = np.array(locations, dtype=float)
        if space.has_time:
            out[:, 1:] *= self.factor
        else:
            out *= self.factor
        return out

    def push_forward(self, mean):
        # mu(A / lam) = lam ** alpha * mu(A)
        return HomogeneousMeasure(mean.space, mean.alpha, mean.directions,
                                  mean.weights * self.factor ** mean.alpha)


@dataclass(frozen=True)
class NormPower(PrmTransform):
    """(r, omega) -> (r ** beta, omega) in cone-distance polar form."""

    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise InputError("norm power must be positive")

    def apply(self, space, locations):
        out = np.array(locations, dtype=float)
        if len(out) == 0:
            return out
        factor = np.asarray(cone_distance(space, out)) ** (self.beta - 1.0)
        if space.has_time:
            out[:, 1:] *= factor[:, None]
        else:
            out *= factor[:, None]
        return out

    def push_forward(self, mean):
        return HomogeneousMeasure(mean.space, mean.alpha / self.beta,
                                  mean.directions, mean.weights)


def map_prm(n, transform):
    """
    N o T^-1: apply T to every atom, keeping the weights.

    Raises:
        UnsupportedError: If ``transform`` is not a ``PrmTransform``.
    """
    if not isinstance(transform, PrmTransform):
        raise UnsupportedError(f"unsupported transform {transform!r}")
    return AtomicMeasure(n.space, transform.apply(n.space, n.locations),
                         n.weights)


ProbabilitySource = Union[float, tuple, Callable]


def _checked_probabilities(probs, count, width):
    probs = np.broadcast_to(np.asarray(probs, dtype=float), (count, width))
    if np.any(probs < 0) or np.any(probs > 1):
        raise InputError("mark probabilities must lie in [0, 1]")
    if np.any(np.abs(probs.sum(axis=1) - 1.0) > 1e-9):
        raise InputError("mark probabilities must sum to 1")
    return probs


class MarkKernel(abc.ABC):
    """
    Transition function G(x, .) onto a finite label set, listed in the
    ``labels`` attribute of each kernel.
    """

    @abc.abstractmethod
    def probabilities(self, space, locations):
        """(atoms x labels) matrix of G(x, {label})."""

    @abc.abstractmethod
    def constant_probabilities(self):
        """Label probabilities when they do not depend on x, else None."""


@dataclass(frozen=True)
class BernoulliKernel(MarkKernel):
    """
    Mark 1 with probability q(x), 0 otherwise.
    """

    q: ProbabilitySource
    labels = (0, 1)

    def _q(self, space, locations):
        if callable(self.q):
            return np.asarray(self.q(locations), dtype=float).reshape(-1)
        return np.full(len(locations), float(self.q))

    def probabilities(self, space, locations):
        q = self._q(space, locations)
        return _checked_probabilities(np.column_stack((1.0 - q, q)),
                                      len(locations), 2)

    def constant_probabilities(self):
        if callable(self.q):
            return None
        return _checked_probabilities((1.0 - self.q, self.q), 1, 2)[0]


@dataclass(frozen=True)
class DiscreteKernel(MarkKernel):
    labels: tuple
    probs: ProbabilitySource

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels) or not self.labels:
            raise InputError("mark labels must be distinct and nonempty")
        if not callable(self.probs):
            _checked_probabilities(self.probs, 1, len(self.labels))

    def probabilities(self, space, locations):
        probs = self.probs(locations) if callable(self.probs) else self.probs
        return _checked_probabilities(probs, len(locations), len(self.labels))

    def constant_probabilities(self):
        if callable(self.probs):
            return None
        return _checked_probabilities(self.probs, 1, len(self.labels))[0]


@dataclass(frozen=True, eq=False)
class MarkedMeasure:
    """
    Class representing sum_i delta_{(X_i, K_i)}: a ground measure with one
    label per atom.
    """

    ground: AtomicMeasure
    mark_index: np.ndarray
    labels: tuple

    @property
    def marks(self):
        return [self.labels[k] for k in self.mark_index]

    def select(self, label):
        """Ground atoms carrying ``label``."""
        if label not in self.labels:
            raise InputError(f"unknown mark label {label!r}")
        return self.ground.subset(
            self.mark_index == self.labels.index(label))

    def thinned(self):
        """Atoms kept by a Bernoulli kernel (mark 1)."""
        if self.labels != (0, 1):
            raise InputError("thinning needs a Bernoulli kernel")
        return self.select(1)


def mark_prm(n, kernel, seed, replicate=0):
    """
    Attach an independent mark K_i ~ G(X_i, .) to every atom.

    Atoms of weight above one are marked as a whole.
    """
    probs = kernel.probabilities(n.space, n.locations)
    rng = rng_stream(seed, MARK_STREAM, replicate)
    u = rng.random(len(n))
    edges = np.cumsum(probs, axis=1)
    edges[:, -1] = 1.0
    index = np.argmax(u[:, None] < edges, axis=1) if len(n) else \
        np.zeros(0, dtype=int)
    return MarkedMeasure(n, index, tuple(kernel.labels))


def marked_mean(mean, kernel, label):
    """
    Marginal of mu*(dx, dy) = mu(dx) G(x, dy) on one label, for kernels
    that do not depend on x.
    """
    probs = kernel.constant_probabilities()
    if probs is None:
        raise UnsupportedError("location-dependent kernels have no "
                               "homogeneous mark marginal")
    p = probs[tuple(kernel.labels).index(label)]
    if p <= 0:
        raise InputError(f"label {label!r} has probability zero")
    return HomogeneousMeasure(mean.space, mean.alpha, mean.directions,
                              mean.weights * p)
