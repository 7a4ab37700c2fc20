"""
This module contains the rv command group: regular-variation checks of
heavy-tailed samplers.
"""

import logging
import math

import click

from models.cone_space import euclidean_origin
from models.measures import HomogeneousMeasure, TailSet
from models.regvar import (HeavyTailSampler, RadialLaw, ScalingMode,
                           homogeneity_ratio, rv_check)
from resources.output import (FAILED_CHECK, abort, config_errors, dumps,
                              envelope, out_option, seed_option, write_text)
from schemas import ReportSchema

logger = logging.getLogger(__name__)

blp = click.Group("rv", help="Regular variation of heavy-tailed vectors.")


class FloatList(click.ParamType):
    """Comma separated floats, e.g. ``100,1000``."""

    name = "floats"

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return list(value)
        try:
            return [float(v) for v in str(value).split(",") if v.strip()]
        except ValueError:
            self.fail(f"{value!r} is not a comma separated list of numbers",
                      param, ctx)


class BandParam(click.ParamType):
    """A radial band ``lo:hi``; an empty or ``inf`` upper end is unbounded."""

    name = "lo:hi"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        lo, _, hi = str(value).partition(":")
        try:
            return float(lo), float(hi) if hi.strip() else math.inf
        except ValueError:
            self.fail(f"{value!r} is not a band lo:hi", param, ctx)


def sampler_options(func):
    options = [
        click.option("--alpha", type=float, default=1.0, show_default=True),
        click.option("--radial", default=RadialLaw.PURE_PARETO.value,
                     show_default=True,
                     type=click.Choice([law.value for law in RadialLaw])),
        click.option("--gamma", type=float, default=0.0, show_default=True,
                     help="Exponent of the log-perturbed law."),
        click.option("--scaling", default=None,
                     type=click.Choice([mode.value for mode in ScalingMode]),
                     help="b(t); default analytic for pure Pareto, exact "
                     "quantile otherwise."),
        click.option("--reps", type=int, default=200, show_default=True),
        click.option("--sample-size", type=int, default=None,
                     help="Vectors per replicate (default 100 * t)."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _sampler(alpha, radial, gamma):
    limit = HomogeneousMeasure(euclidean_origin(1), alpha, [[1.0]], [1.0])
    return HeavyTailSampler.from_measure(limit, radial, gamma)


def _bands(bands):
    return [TailSet(lo, hi) for lo, hi in bands]


def _band_json(band):
    lo, hi = band
    return [lo, None if math.isinf(hi) else hi]


@blp.command("check")
@sampler_options
@click.option("--t-grid", type=FloatList(), default="100,1000",
              show_default=True)
@click.option("--sets", type=BandParam(), multiple=True,
              default=("1:", "2:", "0.5:2", "4:"), show_default=True)
@seed_option
@out_option
@click.pass_context
def check(ctx, alpha, radial, gamma, scaling, reps, sample_size, t_grid,
          sets, seed, out):
    """
    Compare t * P(X in b(t) A) with mu(A) over a grid of t.

    Exits with status 1 when a check fails; the report is written first.
    """
    with config_errors():
        sampler = _sampler(alpha, radial, gamma)
        report = rv_check(sampler, None, t_grid, _bands(sets), reps, seed,
                          sample_size, scaling)
    params = dict(ctx.params, sets=[_band_json(band) for band in sets])
    document = envelope(ctx, params, seed, report=ReportSchema().dump(report))
    write_text(out, dumps(document))
    if not report.passed:
        abort(FAILED_CHECK, "; ".join(report.failures))


@blp.command("ratio")
@sampler_options
@click.option("--band", type=BandParam(), default="1:", show_default=True)
@click.option("--lam", type=float, default=2.0, show_default=True)
@click.option("--t", type=float, default=1000.0, show_default=True)
@seed_option
@out_option
@click.pass_context
def ratio(ctx, alpha, radial, gamma, scaling, reps, sample_size, band, lam,
          t, seed, out):
    """
    Estimate mu(lam A) / mu(A) and compare it with lam ** -alpha.
    """
    with config_errors():
        sampler = _sampler(alpha, radial, gamma)
        estimate = homogeneity_ratio(sampler, _bands([band])[0], lam, t, reps,
                                     seed, sample_size, scaling)
    params = dict(ctx.params, band=_band_json(band))
    document = envelope(ctx, params, seed, **estimate._asdict())
    write_text(out, dumps(document))
