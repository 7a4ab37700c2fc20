"""
This module contains the test functions vanishing near the cone and the
Laplace functionals built from them.
"""

import abc
import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate

from models.cone_space import cone_distance
from models.errors import InputError
from models.measures import HomogeneousMeasure, TailSet, tail_mass
from workers import pool

logger = logging.getLogger(__name__)

QUADRATURE_TOLERANCE = 1e-10


class TestFunction(abc.ABC):
    """
    A bounded nonnegative function that is zero on C^r for some r > 0.
    """

    __test__ = False

    @property
    @abc.abstractmethod
    def vanish_radius(self):
        """Largest r known to satisfy f = 0 on {cone_distance < r}."""

    @abc.abstractmethod
    def values(self, space, locations):
        """f at each row of ``locations``."""


def _disjoint(a, b):
    if a.u_hi <= b.u_lo or b.u_hi <= a.u_lo:
        return True
    if a.directions is not None and b.directions is not None \
            and not a.directions & b.directions:
        return True
    if a.time_window is not None and b.time_window is not None:
        return a.time_window[1] <= b.time_window[0] \
            or b.time_window[1] <= a.time_window[0]
    return False


@dataclass(frozen=True)
class StepFunction(TestFunction):
    """
    f = sum_i c_i 1_{A_i} over disjoint tail sets.

    Attributes:
        pieces (tuple): ``(TailSet, height)`` pairs.
        reference (HomogeneousMeasure): Resolves angular directions.
    """

    pieces: tuple = ()
    reference: Optional[HomogeneousMeasure] = field(default=None,
                                                    compare=False)

    def __post_init__(self):
        pieces = tuple((A, float(c)) for A, c in self.pieces)
        for _, c in pieces:
            if not (c >= 0 and math.isfinite(c)):
                raise InputError(f"step heights must be finite and "
                                 f"nonnegative, got {c}")
        for i, (a, _) in enumerate(pieces):
            for b, _ in pieces[i + 1:]:
                if not _disjoint(a, b):
                    raise InputError("step pieces must be disjoint sets")
        object.__setattr__(self, "pieces", pieces)

    @property
    def vanish_radius(self):
        return min((A.u_lo for A, _ in self.pieces), default=math.inf)

    @property
    def bound(self):
        return max((c for _, c in self.pieces), default=0.0)

    def values(self, space, locations):
        locations = np.asarray(locations, dtype=float).reshape(
            -1, space.point_size)
        out = np.zeros(len(locations))
        for A, c in self.pieces:
            out += c * A.contains(space, locations, self.reference)
        return out

    def scaled(self, factor):
        """factor * f."""
        return StepFunction(tuple((A, c * factor) for A, c in self.pieces),
                            self.reference)


@dataclass(frozen=True)
class RampFunction(TestFunction):
    """
    Continuous x -> c * clamp((cone_distance(x) - r) / w, 0, 1), optionally
    restricted to times in (t1, t2].
    """

    c: float
    r: float
    w: float
    time_window: Optional[tuple] = None

    def __post_init__(self):
        if not (self.c >= 0 and self.r > 0 and self.w > 0):
            raise InputError("ramp needs c >= 0, r > 0 and w > 0")
        if self.time_window is not None:
            # validated through TailSet
            window = TailSet(self.r, time_window=self.time_window)
            object.__setattr__(self, "time_window", window.time_window)

    @property
    def vanish_radius(self):
        return self.r

    @property
    def bound(self):
        return self.c

    def values(self, space, locations):
        locations = np.asarray(locations, dtype=float).reshape(
            -1, space.point_size)
        if len(locations) == 0:
            return np.zeros(0)
        distances = np.asarray(cone_distance(space, locations))
        out = self.c * np.clip((distances - self.r) / self.w, 0.0, 1.0)
        if self.time_window is not None:
            if not space.has_time:
                raise InputError("time window given on a space without time")
            t1, t2 = self.time_window
            out = out * ((locations[:, 0] > t1) & (locations[:, 0] <= t2))
        return out


def integrate_against(n, f):
    """
    N(f) = sum_i w_i f(x_i).
    """
    if len(n) == 0:
        return 0.0
    return math.fsum(n.weights * f.values(n.space, n.locations))


def _time_factor(window, time_horizon):
    if time_horizon is None:
        if window is not None:
            raise InputError("time window on a process without time axis")
        return 1.0
    if window is None:
        return float(time_horizon)
    t1, t2 = window
    return max(min(t2, time_horizon) - t1, 0.0)


def _radial_quad(func, lo, hi):
    value, _ = integrate.quad(func, lo, hi, epsabs=QUADRATURE_TOLERANCE,
                              epsrel=QUADRATURE_TOLERANCE, limit=200)
    return value


def _step_exponent(mean, f, time_horizon, method):
    alpha = mean.alpha
    terms = []
    for A, c in f.pieces:
        if c == 0:
            continue
        factor = _time_factor(A.time_window, time_horizon)
        radial_set = TailSet(A.u_lo, A.u_hi, A.directions)
        loss = -math.expm1(-c)
        if method == "exact":
            terms.append(loss * tail_mass(mean, radial_set) * factor)
            continue
        weight = tail_mass(mean, TailSet(1.0, directions=A.directions))
        density = _radial_quad(lambda u: alpha * u ** (-alpha - 1.0),
                               A.u_lo, A.u_hi)
        terms.append(loss * weight * density * factor)
    return math.fsum(terms)


def _ramp_exponent(mean, f, time_horizon):
    alpha = mean.alpha
    top = f.r + f.w

    def integrand(u):
        return -math.expm1(-f.c * (u - f.r) / f.w) * alpha * u ** (
            -alpha - 1.0)

    ramp_part = _radial_quad(integrand, f.r, top)
    flat_part = -math.expm1(-f.c) * top ** -alpha
    factor = _time_factor(f.time_window, time_horizon)
    return mean.total_weight * (ramp_part + flat_part) * factor


def laplace_exponent(mean, f, time_horizon=None, method="exact"):
    """
    The exponent int (1 - e^-f) dmu of the PRM Laplace functional.

    Args:
        mean (HomogeneousMeasure): The mean measure mu.
        f (TestFunction): Step or ramp function.
        time_horizon (float): T for a process on [0, T] x O with mean
            dt x mu; None for a process on O.
        method (str): "exact" or "quadrature". Ramp functions are always
            integrated numerically.
    """
    if method not in ("exact", "quadrature"):
        raise InputError(f"unknown method {method!r}")
    if not f.vanish_radius > 0:
        raise InputError("test function must vanish near the cone")
    if isinstance(f, StepFunction):
        return _step_exponent(mean, f, time_horizon, method)
    if isinstance(f, RampFunction):
        return _ramp_exponent(mean, f, time_horizon)
    raise InputError(f"unsupported test function {f!r}")


def analytic_prm_laplace(mean, f, time_horizon=None, method="exact"):
    """
    L_N[f] = exp(-int (1 - e^-f) dmu) for N = PRM(mu) (or dt x mu).
    """
    return math.exp(-laplace_exponent(mean, f, time_horizon, method))


class LaplaceEstimate(NamedTuple):
    estimate: float
    std_error: float


def _mean_and_error(values):
    count = len(values)
    mean = math.fsum(values) / count
    variance = math.fsum((v - mean) ** 2 for v in values) / (count - 1)
    return mean, math.sqrt(variance / count)


def laplace_terms(samples, f):
    """exp(-N_i(f)) for every sample."""
    return np.array(pool.map(lambda n: math.exp(-integrate_against(n, f)),
                             samples))


def empirical_laplace(samples, f):
    """
    Monte-Carlo Laplace functional: mean and standard error of
    exp(-N_i(f)).

    Raises:
        InputError: With fewer than two samples.
    """
    samples = list(samples)
    if len(samples) < 2:
        raise InputError("empirical Laplace functional needs >= 2 samples")
    return LaplaceEstimate(*_mean_and_error(laplace_terms(samples, f)))


@dataclass
class ContinuityReport:
    gaps: list
    standard_errors: list
    sup_gaps: list
    monotone: bool
    pointwise_monotone: bool
    common_radius: bool
    violations: list


def laplace_continuity_check(samples, f_sequence, f_limit):
    """
    Check L[f_n] -> L[f] along a sequence of test functions.

    Gaps are |mean of exp(-N_i f_n) - exp(-N_i f)| over paired samples;
    they must not grow by more than 3 standard errors from one step to the
    next. A sequence whose members vanish on different radii is flagged,
    not rejected.
    """
    samples = list(samples)
    if len(samples) < 2:
        raise InputError("continuity check needs >= 2 samples")
    f_sequence = list(f_sequence)
    limit_terms = laplace_terms(samples, f_limit)
    gaps, errors = [], []
    for f in f_sequence:
        differences = laplace_terms(samples, f) - limit_terms
        gap, error = _mean_and_error(differences)
        gaps.append(abs(gap))
        errors.append(error)

    violations = []
    radii = [f.vanish_radius for f in f_sequence] + [f_limit.vanish_radius]
    common_radius = all(abs(r - radii[0]) <= 1e-12 * max(1.0, abs(r))
                        for r in radii)
    if not common_radius:
        violations.append(f"vanish radii differ: {radii}")

    monotone = True
    for k in range(1, len(gaps)):
        if gaps[k] > gaps[k - 1] + 3 * errors[k]:
            monotone = False
            violations.append(f"gap grows at step {k}: {gaps[k - 1]:.6g} "
                              f"-> {gaps[k]:.6g}")

    nonempty = [n for n in samples if len(n)]
    if nonempty and f_sequence:
        space = nonempty[0].space
        locations = np.vstack([n.locations for n in nonempty])
        limit_values = f_limit.values(space, locations)
        table = np.array([f.values(space, locations) for f in f_sequence])
        sup_gaps = np.max(np.abs(table - limit_values), axis=1).tolist()
        steps = np.diff(table, axis=0)
        pointwise = bool(np.all(steps >= -1e-12) or np.all(steps <= 1e-12))
    else:
        sup_gaps = [0.0] * len(f_sequence)
        pointwise = True
    if not pointwise:
        violations.append("sequence is not pointwise monotone")
    logger.debug("continuity check over %d functions: gaps %s",
                 len(f_sequence), gaps)
    return ContinuityReport(gaps, errors, sup_gaps, monotone, pointwise,
                            common_radius, violations)
