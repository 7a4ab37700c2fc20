"""
This module contains heavy-tailed random vectors with a known limit
measure, the scaling functions b(t), empirical tail measures and the
regular-variation check t * P(X in b(t) A) -> mu(A).
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from models.cone_space import cone_distance
from models.errors import InputError
from models.measures import (AtomicMeasure, HomogeneousMeasure, TailSet,
                             tail_mass)
from models.report import ConvergenceReport, TailRow, Z_LIMIT, z_score
from workers import pool, rng_stream

logger = logging.getLogger(__name__)

VECTOR_STREAM = 2
RV_CHECK = 0
COMPLETE_CONVERGENCE = 1
HOMOGENEITY = 2
BISECTION_STEPS = 100


class RadialLaw(str, enum.Enum):
    PURE_PARETO = "pure-pareto"
    LOG_PERTURBED = "log-perturbed"


@dataclass(frozen=True, eq=False)
class HeavyTailSampler:
    """
    Class representing X = R * omega with omega drawn from the angular
    weights and R from the radial law.

    Pure Pareto: P(R > s) = s^-alpha for s >= 1.
    Log-perturbed: P(R > s) = min(1, s^-alpha (1 + log s)^gamma), the
    cap keeping the tail nonincreasing when gamma > alpha.
    """

    space: object
    alpha: float
    directions: np.ndarray
    weights: np.ndarray
    radial_law: RadialLaw = RadialLaw.PURE_PARETO
    gamma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "radial_law", RadialLaw(self.radial_law))
        limit = HomogeneousMeasure(self.space, self.alpha, self.directions,
                                   self.weights)
        object.__setattr__(self, "directions", limit.directions)
        object.__setattr__(self, "weights", limit.weights)
        object.__setattr__(self, "alpha", limit.alpha)

    @classmethod
    def from_measure(cls, measure, radial_law=RadialLaw.PURE_PARETO,
                     gamma=0.0):
        return cls(measure.space, measure.alpha, measure.directions,
                   measure.weights, radial_law, gamma)

    @property
    def direction_probabilities(self):
        return self.weights / self.weights.sum()

    def limit_measure(self):
        """mu with t P(X in b(t) .) -> mu for b(t) the radial quantile."""
        return HomogeneousMeasure(self.space, self.alpha, self.directions,
                                  self.direction_probabilities)

    def _log_tail(self, y):
        value = -self.alpha * y
        if self.radial_law is RadialLaw.LOG_PERTURBED:
            value = value + self.gamma * np.log1p(y)
        return value

    def tail(self, s):
        """P(R > s)."""
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            y = np.log(np.maximum(s, 1.0))
        out = np.minimum(1.0, np.exp(self._log_tail(y)))
        out = np.where(s < 1.0, 1.0, out)
        return float(out) if out.ndim == 0 else out

    def quantile(self, p):
        """
        Smallest s >= 1 with P(R > s) <= p, for p in (0, 1].
        """
        p = np.asarray(p, dtype=float)
        if np.any(p <= 0) or np.any(p > 1):
            raise InputError("tail probability must lie in (0, 1]")
        target = np.log(p)
        if self.radial_law is RadialLaw.PURE_PARETO:
            out = np.exp(-target / self.alpha)
            return float(out) if out.ndim == 0 else out
        # bisection on y = log s along the decreasing branch
        peak = max(0.0, self.gamma / self.alpha - 1.0)
        lo = np.full(target.shape, peak)
        hi = lo + 1.0 - 2.0 * target / self.alpha
        while True:
            short = self._log_tail(hi) > target
            if not np.any(short):
                break
            hi = np.where(short, 2.0 * hi + 1.0, hi)
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            above = self._log_tail(mid) > target
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        out = np.exp(hi)
        return float(out) if out.ndim == 0 else out


def sample_vector(s, seed, count, stream=()):
    """
    Draw ``count`` iid copies of X.

    Args:
        s (HeavyTailSampler): The law.
        seed (int): Master seed.
        count (int): Number of vectors.
        stream (tuple): Extra integers keying an independent stream.

    Returns:
        numpy.ndarray: One vector per row.
    """
    if count < 1:
        raise InputError("count must be at least 1")
    rng = rng_stream(seed, VECTOR_STREAM, *stream)
    radii = np.asarray(s.quantile(1.0 - rng.random(count))).reshape(-1)
    picks = rng.choice(len(s.weights), size=count,
                       p=s.direction_probabilities)
    return s.directions[picks] * radii[:, None]


class ScalingMode(str, enum.Enum):
    ANALYTIC = "analytic"
    QUANTILE = "quantile"
    EMPIRICAL_QUANTILE = "empirical-quantile"


@dataclass(frozen=True, eq=False)
class ScalingFunction:
    """
    Class representing the normalisation b(t).

    analytic: t^(1/alpha). quantile: the exact radial quantile of the
    sampler at 1/t. empirical-quantile: the sample radius with at most
    m/t sample radii above it.
    """

    mode: ScalingMode
    alpha: Optional[float] = None
    sampler: Optional[HeavyTailSampler] = None
    radii: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "mode", ScalingMode(self.mode))

    @classmethod
    def analytic(cls, alpha):
        return cls(ScalingMode.ANALYTIC, alpha=float(alpha))

    @classmethod
    def exact(cls, sampler):
        return cls(ScalingMode.QUANTILE, sampler=sampler)

    @classmethod
    def empirical(cls, space, samples):
        radii = np.sort(np.asarray(cone_distance(
            space, np.asarray(samples, dtype=float).reshape(
                -1, space.point_size))))[::-1]
        if len(radii) == 0:
            raise InputError("empirical scaling needs samples")
        return cls(ScalingMode.EMPIRICAL_QUANTILE, radii=radii)

    def __call__(self, t):
        return scaling_b(self, t)


def scaling_b(sf, t):
    """
    b(t) for t >= 1.

    Raises:
        InputError: If t < 1.
    """
    if t < 1:
        raise InputError(f"scaling needs t >= 1, got {t}")
    if sf.mode is ScalingMode.ANALYTIC:
        return t ** (1.0 / sf.alpha)
    if sf.mode is ScalingMode.QUANTILE:
        return sf.sampler.quantile(1.0 / t)
    exceed = int(math.floor(len(sf.radii) / t))
    return float(sf.radii[min(exceed, len(sf.radii) - 1)])


def make_scaling(sampler, mode=None, samples=None):
    """
    Scaling function for ``sampler``. The default is analytic for pure
    Pareto laws and the exact quantile otherwise.
    """
    if mode is None:
        mode = ScalingMode.ANALYTIC \
            if sampler.radial_law is RadialLaw.PURE_PARETO \
            else ScalingMode.QUANTILE
    mode = ScalingMode(mode)
    if mode is ScalingMode.ANALYTIC:
        return ScalingFunction.analytic(sampler.alpha)
    if mode is ScalingMode.QUANTILE:
        return ScalingFunction.exact(sampler)
    return ScalingFunction.empirical(sampler.space, samples)


def empirical_tail_measure(samples, t, b, space):
    """
    (t / m) * sum_i delta_{X_i / b(t)}.

    Atoms that land on the cone are dropped.
    """
    samples = np.asarray(samples, dtype=float).reshape(-1, space.point_size)
    count = len(samples)
    if count < 1:
        raise InputError("empirical tail measure needs samples")
    scaled = samples / b(t)
    keep = np.asarray(cone_distance(space, scaled)) > 0
    return AtomicMeasure(space, scaled[keep], np.full(int(keep.sum()),
                                                      t / count))


def finite_t_mass(s, A, t, b):
    """
    Exact t * P(X / b(t) in A).
    """
    if A.time_window is not None:
        raise InputError("tail sets for regular variation carry no time")
    scale = b(t)
    limit = s.limit_measure()
    share = tail_mass(limit, TailSet(1.0, directions=A.directions))
    upper = 0.0 if math.isinf(A.u_hi) else s.tail(scale * A.u_hi)
    return t * share * (s.tail(scale * A.u_lo) - upper)


def _replicate_masses(s, sets, t, reps, seed, stream, sample_size, mode,
                      reference):
    def masses(k):
        samples = sample_vector(s, seed, sample_size, stream + (k,))
        b = make_scaling(s, mode, samples)
        measure = empirical_tail_measure(samples, t, b, s.space)
        return [float(np.sum(measure.weights[A.contains(
            s.space, measure.locations, reference)])) for A in sets]

    return np.array(pool.map(masses, range(reps)))


def _mean_and_error(column):
    mean = math.fsum(column) / len(column)
    variance = math.fsum((v - mean) ** 2 for v in column) / (len(column) - 1)
    return mean, math.sqrt(variance / len(column))


def rv_check(s, mean, t_grid, tail_sets, reps, seed, sample_size=None,
             scaling=None):
    """
    Empirical check of t * P(X in b(t) A) -> mu(A) on a grid of t.

    Args:
        s (HeavyTailSampler): The law of X.
        mean (HomogeneousMeasure): The claimed limit mu; None for the
            sampler's own limit.
        t_grid (list): Scales t >= 1.
        tail_sets (list): Tail sets without time windows.
        reps (int): Replicates per scale.
        seed (int): Master seed.
        sample_size (int): Vectors per replicate, default 100 * max(t).
        scaling (str): ScalingMode value; default depends on the law.

    Returns:
        ConvergenceReport: One tail row per (t, A); passed iff every
        |z| against mu(A) is at most 4.
    """
    if reps < 2:
        raise InputError("rv check needs at least 2 replicates")
    mean = s.limit_measure() if mean is None else mean
    tail_sets = list(tail_sets)
    if sample_size is None:
        sample_size = int(100 * max(t_grid))
    report = ConvergenceReport(kind="rv-check")
    for ti, t in enumerate(t_grid):
        table = _replicate_masses(s, tail_sets, t, reps, seed,
                                  (RV_CHECK, ti), sample_size, scaling, mean)
        b = make_scaling(s, scaling) \
            if scaling != ScalingMode.EMPIRICAL_QUANTILE else None
        for j, A in enumerate(tail_sets):
            estimate, error = _mean_and_error(table[:, j])
            target = tail_mass(mean, A)
            finite = finite_t_mass(s, A, t, b) if b is not None else None
            z = z_score(estimate, target, error)
            z_finite = None if finite is None else z_score(estimate, finite,
                                                           error)
            report.tail_rows.append(TailRow(t, j, estimate, error, target,
                                            finite, z, z_finite))
            if abs(z) > Z_LIMIT:
                report.fail(f"t={t:g} set {j}: |z|={abs(z):.3g}")
        logger.info("rv check t=%g done (%d reps x %d vectors)", t, reps,
                    sample_size)
    return report


class RatioEstimate(NamedTuple):
    ratio: float
    std_error: float
    target: float
    z: float


def homogeneity_ratio(s, A, lam, t, reps, seed, sample_size=None,
                      scaling=None):
    """
    Estimate mu(lam A) / mu(A) from paired replicates; the delta-method
    standard error uses the residuals y_k - R x_k.
    """
    if reps < 2:
        raise InputError("ratio needs at least 2 replicates")
    if sample_size is None:
        sample_size = int(100 * t)
    table = _replicate_masses(s, [A, A.scaled(lam)], t, reps, seed,
                              (HOMOGENEITY, 0), sample_size, scaling,
                              s.limit_measure())
    x, y = table[:, 0], table[:, 1]
    x_bar = math.fsum(x) / reps
    if x_bar <= 0:
        raise InputError("no mass observed in the reference set")
    ratio = (math.fsum(y) / reps) / x_bar
    _, residual_error = _mean_and_error(y - ratio * x)
    error = residual_error / x_bar
    target = lam ** -s.alpha
    return RatioEstimate(ratio, error, target, z_score(ratio, target, error))
