"""
This module contains the complete convergence experiment for
N_n = sum_i delta_{(i/n, X_i / b(n))}, the Poisson count test and the
tightness diagnostics.
"""

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import stats

from models.cone_space import cone_distance, make_product_space
from models.errors import InputError
from models.laplace import (RampFunction, analytic_prm_laplace,
                            integrate_against)
from models.measures import AtomicMeasure, TailSet, atomic_mass, tail_mass
from models.prm import PrmSpec, sample_prm
from models.regvar import (COMPLETE_CONVERGENCE, ScalingMode, make_scaling,
                           sample_vector)
from models.report import (GAP_SLACK, P_LIMIT, Z_LIMIT, ConvergenceReport,
                           CountRow, LaplaceRow, LawRow, TightnessRow,
                           z_score)
from workers import pool

logger = logging.getLogger(__name__)

MIN_COUNTS = 100
MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class TightnessSpec:
    r_grid: tuple
    m_grid: tuple
    box_bound: float
    eps: float
    eps_prime: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "r_grid", tuple(float(r)
                                                 for r in self.r_grid))
        object.__setattr__(self, "m_grid", tuple(float(m)
                                                 for m in self.m_grid))
        if len(self.r_grid) != len(self.m_grid):
            raise InputError("r_grid and M_grid must have equal length")
        if any(r <= 0 for r in self.r_grid) or any(
                a <= b for a, b in zip(self.r_grid, self.r_grid[1:])):
            raise InputError("r_grid must be positive and strictly "
                             "decreasing")
        if not (self.box_bound > 0 and self.eps > 0):
            raise InputError("box bound and eps must be positive")

    @property
    def threshold(self):
        """Outside-compact mass that counts as escaping (eps')."""
        return self.eps if self.eps_prime is None else self.eps_prime


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """
    Class representing one complete convergence run.

    Attributes:
        sampler (HeavyTailSampler): Law of the X_i.
        n_grid (tuple): Sample sizes n.
        reps (int): Replicates per n.
        test_functions (tuple): Functions on [0, 1] x O.
        tail_sets (tuple): Sets on [0, 1] x O for the count tests.
        seed (int): Master seed.
        scaling (str): ScalingMode value; None picks the sampler default.
        tightness (TightnessSpec): Optional diagnostic across n_grid.
        law_test (bool): Compare the law of N_n(f) with PRM N(f).
    """

    sampler: object
    n_grid: tuple
    reps: int
    test_functions: tuple = ()
    tail_sets: tuple = ()
    seed: int = 0
    scaling: Optional[str] = None
    tightness: Optional[TightnessSpec] = None
    law_test: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "test_functions", tuple(self.test_functions))
        object.__setattr__(self, "tail_sets", tuple(self.tail_sets))
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise InputError("n_grid must hold positive sample sizes")
        if self.reps < 2:
            raise InputError("at least 2 replicates are required")
        if self.tail_sets and self.reps < MIN_COUNTS:
            raise InputError(f"count tests need at least {MIN_COUNTS} "
                             f"replicates")
        for f in self.test_functions:
            if not f.vanish_radius > 0:
                raise InputError("test functions must vanish near the cone")
            for window in _windows(f):
                _check_unit_window(window)
        for A in self.tail_sets:
            _check_unit_window(A.time_window)


def _windows(f):
    if isinstance(f, RampFunction):
        return [f.time_window]
    return [A.time_window for A, _ in f.pieces]


def _check_unit_window(window):
    if window is not None and window[1] > 1.0:
        raise InputError(f"time support {window} leaves [0, 1]")


def build_empirical_pp(samples, b_n, space):
    """
    N_n = sum_i delta_{(i/n, X_i / b_n)} on [0, inf) x S.

    Args:
        samples (numpy.ndarray): X_1..X_n, one per row.
        b_n (float): Normalisation, > 0.
        space (SpaceDescriptor): The S space of the samples.
    """
    samples = np.asarray(samples, dtype=float).reshape(-1, space.point_size)
    n = len(samples)
    if n < 1:
        raise InputError("need at least one sample")
    if not b_n > 0:
        raise InputError("b_n must be positive")
    times = np.arange(1, n + 1) / n
    scaled = samples / b_n
    keep = np.asarray(cone_distance(space, scaled)) > 0
    points = np.column_stack((times[keep], scaled[keep]))
    return AtomicMeasure(make_product_space(space), points,
                         np.ones(int(keep.sum())))


class PoissonTest(NamedTuple):
    p_value: float
    mean_z: float
    var_z: float
    statistic: float
    observed: list
    expected: list


def _merged_bins(observed, expected):
    """
    Merge neighbouring bins left to right until each expects >= 5;
    a short remainder joins the last full bin.
    """
    obs_bins, exp_bins = [], []
    obs_acc = exp_acc = 0.0
    for o, e in zip(observed, expected):
        obs_acc += o
        exp_acc += e
        if exp_acc >= MIN_EXPECTED:
            obs_bins.append(obs_acc)
            exp_bins.append(exp_acc)
            obs_acc = exp_acc = 0.0
    if exp_acc > 0 or obs_acc > 0:
        if obs_bins:
            obs_bins[-1] += obs_acc
            exp_bins[-1] += exp_acc
        else:
            obs_bins.append(obs_acc)
            exp_bins.append(exp_acc)
    return np.array(obs_bins), np.array(exp_bins)


def poisson_count_test(counts, mean):
    """
    Chi-square goodness of fit of integer counts against Poisson(mean),
    plus z-scores of the sample mean and variance.

    Raises:
        InputError: With fewer than 100 counts or a nonpositive mean.
    """
    counts = np.asarray(counts).astype(int).reshape(-1)
    m = len(counts)
    if m < MIN_COUNTS:
        raise InputError(f"count test needs at least {MIN_COUNTS} counts")
    if not mean > 0:
        raise InputError("Poisson mean must be positive")
    if np.any(counts < 0):
        raise InputError("counts must be nonnegative")
    top = int(max(counts.max(), stats.poisson.ppf(1 - 1e-12, mean))) + 1
    ks = np.arange(top)
    expected = m * np.append(stats.poisson.pmf(ks, mean),
                             stats.poisson.sf(top - 1, mean))
    observed = np.append(np.bincount(counts, minlength=top)[:top], 0)
    obs_bins, exp_bins = _merged_bins(observed, expected)
    if len(obs_bins) < 2:
        statistic, p_value = 0.0, 1.0
    else:
        statistic = float(np.sum((obs_bins - exp_bins) ** 2 / exp_bins))
        p_value = float(stats.chi2.sf(statistic, len(obs_bins) - 1))
    sample_mean = math.fsum(counts) / m
    sample_var = math.fsum((counts - sample_mean) ** 2) / (m - 1)
    mean_z = (sample_mean - mean) / math.sqrt(mean / m)
    var_z = (sample_var - mean) / math.sqrt((mean + 2 * mean ** 2) / m)
    return PoissonTest(p_value, mean_z, var_z, statistic,
                       obs_bins.tolist(), exp_bins.tolist())


def count_covariance(x, y):
    """
    Sample covariance of paired counts and its standard error.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m = len(x)
    if m < 2 or len(y) != m:
        raise InputError("need at least 2 paired counts")
    products = (x - x.mean()) * (y - y.mean())
    covariance = math.fsum(products) / (m - 1)
    return covariance, float(np.std(products, ddof=1) / math.sqrt(m))


def finite_n_mean(s, A, n, b_n):
    """
    Exact E N_n(A) = #{i : i/n in window} * P(X / b_n in radial part).
    """
    if A.time_window is None:
        hits = n
    else:
        t1, t2 = A.time_window
        hits = min(n, math.floor(n * t2)) - min(n, math.floor(n * t1))
    limit = s.limit_measure()
    share = tail_mass(limit, TailSet(1.0, directions=A.directions))
    upper = 0.0 if math.isinf(A.u_hi) else s.tail(b_n * A.u_hi)
    return hits * share * (s.tail(b_n * A.u_lo) - upper)


class TightnessTable(NamedTuple):
    rows: list
    passed: bool


def _shell_masses(measure, spec):
    """Mass on {cone_distance >= r} and outside the box there, per r."""
    shell, outside = [], []
    if len(measure):
        distances = measure.cone_distances
        escaped = np.max(np.abs(measure.locations), axis=1) > spec.box_bound
    for r in spec.r_grid:
        if not len(measure):
            shell.append(0.0)
            outside.append(0.0)
            continue
        inside = distances >= r
        shell.append(math.fsum(measure.weights[inside]))
        outside.append(math.fsum(measure.weights[inside & escaped]))
    return shell, outside


def _tightness_rows(shell_groups, outside_groups, spec):
    """
    Rows of the diagnostic; with several groups (one per index t) the
    worst fraction is reported.
    """
    rows = []
    for i, (r, M) in enumerate(zip(spec.r_grid, spec.m_grid)):
        first = max(float(np.mean(group[:, i] > M))
                    for group in shell_groups)
        second = max(float(np.mean(group[:, i] >= spec.threshold))
                     for group in outside_groups)
        rows.append(TightnessRow(r, M, first, second, first < spec.eps,
                                 second < spec.eps))
    return rows


def tightness_diagnostic(ensemble, r_grid, M_grid, box_bound, eps,
                         eps_prime=None):
    """
    Empirical version of the tightness criteria: for each r_i, the share
    of members with mass above M_i on S \\ C^{r_i}, and the share with
    mass >= eps' outside K_i = {cone_distance >= r_i, |coords| <= B}.

    Returns:
        TightnessTable: Rows flagged against ``eps`` and an overall flag.
    """
    spec = TightnessSpec(r_grid, M_grid, box_bound, eps, eps_prime)
    ensemble = list(ensemble)
    if not ensemble:
        raise InputError("ensemble is empty")
    masses = [_shell_masses(member, spec) for member in ensemble]
    shell = np.array([m[0] for m in masses]).reshape(len(ensemble), -1)
    outside = np.array([m[1] for m in masses]).reshape(len(ensemble), -1)
    rows = _tightness_rows([shell], [outside], spec)
    return TightnessTable(rows, all(r.tight1_ok and r.tight2_ok
                                    for r in rows))


def tightness_thresholds(mean, r_grid, level=1e-6, time_horizon=None):
    """
    M_i at the Poisson (1 - level) quantile of the PRM mass on
    S \\ C^{r_i}.
    """
    horizon = 1.0 if time_horizon is None else time_horizon
    return [float(stats.poisson.ppf(1 - level,
                                    tail_mass(mean, TailSet(r)) * horizon))
            for r in r_grid]


class LawTest(NamedTuple):
    statistic: float
    p_value: float


def integral_law_test(values_a, values_b):
    """
    Two-sample Kolmogorov-Smirnov test of the laws of N_n(f) and N(f).
    """
    result = stats.ks_2samp(np.asarray(values_a, dtype=float),
                            np.asarray(values_b, dtype=float))
    return LawTest(float(result.statistic), float(result.pvalue))


def _replicate(cfg, ni, n, k, b_fixed, reference):
    s = cfg.sampler
    samples = sample_vector(s, cfg.seed, n, (COMPLETE_CONVERGENCE, ni, k))
    b_n = b_fixed if b_fixed is not None else \
        make_scaling(s, ScalingMode.EMPIRICAL_QUANTILE, samples)(n)
    measure = build_empirical_pp(samples, b_n, s.space)
    integrals = [integrate_against(measure, f) for f in cfg.test_functions]
    counts = [int(round(atomic_mass(measure, A, reference)))
              for A in cfg.tail_sets]
    masses = _shell_masses(measure, cfg.tightness) if cfg.tightness \
        else ([], [])
    return integrals, counts, masses


def _prm_integrals(cfg, mean):
    r_min = min(f.vanish_radius for f in cfg.test_functions)
    if math.isinf(r_min):
        # every function is identically zero
        r_min = 1.0
    spec = PrmSpec(mean, r_min, time_horizon=1.0)

    def integrals(k):
        measure = sample_prm(spec, cfg.seed, k)
        return [integrate_against(measure, f) for f in cfg.test_functions]

    return np.array(pool.map(integrals, range(cfg.reps)))


def _mean_and_error(values):
    mean = math.fsum(values) / len(values)
    variance = math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1)
    return mean, math.sqrt(variance / len(values))


def complete_convergence_experiment(cfg):
    """
    Run the complete convergence experiment.

    For each n, ``cfg.reps`` independent N_n are built; Laplace
    functionals are compared with PRM(dt x mu) on [0, 1] and counts on
    each tail set with Poisson((t2 - t1) mu(A)). Passing requires every
    |z| <= 4 and every p >= 0.001 at the largest n, and Laplace gaps that
    do not grow along n_grid beyond 2 standard errors.

    Returns:
        ConvergenceReport: Failures are reported, never raised.
    """
    s = cfg.sampler
    mean = s.limit_measure()
    report = ConvergenceReport(kind="complete-convergence")
    laplace_targets = [analytic_prm_laplace(mean, f, time_horizon=1.0)
                       for f in cfg.test_functions]
    count_targets = [tail_mass(mean, A, time_horizon=1.0)
                     for A in cfg.tail_sets]
    shell_groups, outside_groups = [], []
    largest = len(cfg.n_grid) - 1
    empirical = cfg.scaling is not None and \
        ScalingMode(cfg.scaling) is ScalingMode.EMPIRICAL_QUANTILE
    last_integrals = None

    for ni, n in enumerate(cfg.n_grid):
        b_fixed = None if empirical else make_scaling(s, cfg.scaling)(n)
        results = pool.map(
            lambda k: _replicate(cfg, ni, n, k, b_fixed, mean),
            range(cfg.reps))
        integrals = np.array([r[0] for r in results], dtype=float).reshape(
            cfg.reps, len(cfg.test_functions))
        counts = np.array([r[1] for r in results], dtype=int).reshape(
            cfg.reps, len(cfg.tail_sets))
        for j, target in enumerate(laplace_targets):
            estimate, error = _mean_and_error(np.exp(-integrals[:, j]))
            z = z_score(estimate, target, error)
            report.laplace_rows.append(LaplaceRow(
                n, j, estimate, error, target, z, abs(estimate - target)))
            if ni == largest and abs(z) > Z_LIMIT:
                report.fail(f"n={n} function {j}: |z|={abs(z):.3g}")
        for j, (A, target) in enumerate(zip(cfg.tail_sets, count_targets)):
            test = poisson_count_test(counts[:, j], target)
            finite = finite_n_mean(s, A, n, b_fixed) \
                if b_fixed is not None else None
            report.count_rows.append(CountRow(
                n, j, float(np.mean(counts[:, j])), target, finite,
                test.p_value, test.mean_z, test.var_z, test.observed,
                test.expected))
            if ni == largest and (test.p_value < P_LIMIT
                                  or abs(test.mean_z) > Z_LIMIT):
                report.fail(f"n={n} set {j}: p={test.p_value:.3g}, "
                            f"mean z={test.mean_z:.3g}")
        if cfg.tightness is not None:
            shell_groups.append(np.array([r[2][0] for r in results]))
            outside_groups.append(np.array([r[2][1] for r in results]))
        last_integrals = integrals
        logger.info("complete convergence n=%d done (%d reps)", n, cfg.reps)

    _check_gaps(report, len(laplace_targets))
    if cfg.tightness is not None:
        report.tightness_rows = _tightness_rows(shell_groups, outside_groups,
                                                cfg.tightness)
        for row in report.tightness_rows:
            if not (row.tight1_ok and row.tight2_ok):
                report.fail(f"tightness violated at r={row.r:g}")
    if cfg.law_test and cfg.test_functions:
        reference = _prm_integrals(cfg, mean)
        for j in range(len(cfg.test_functions)):
            law = integral_law_test(last_integrals[:, j], reference[:, j])
            report.law_rows.append(LawRow(cfg.n_grid[-1], j, law.statistic,
                                          law.p_value))
    return report


def _check_gaps(report, functions):
    for j in range(functions):
        rows = [row for row in report.laplace_rows if row.function_index == j]
        for before, after in zip(rows, rows[1:]):
            slack = GAP_SLACK * (before.std_error + after.std_error)
            if after.gap > before.gap + slack:
                report.fail(f"function {j}: Laplace gap grows from "
                            f"n={before.n} to n={after.n}")
