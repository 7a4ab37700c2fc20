"""
This module contains the tightness command.
"""

import click

from models.cone_space import euclidean_origin
from models.convergence import tightness_diagnostic, tightness_thresholds
from models.measures import HomogeneousMeasure
from models.prm import PrmSpec, sample_replicates
from resources.output import (CONFIG_ERROR, abort, config_errors, dumps,
                              envelope, out_option, read_measure,
                              seed_option, write_text)
from resources.rv import FloatList
from schemas import TightnessRowSchema


@click.command("tightness")
@click.option("--input", "inputs", multiple=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Ensemble member (JSON or CSV); repeat for each. "
              "Without inputs a PRM ensemble is sampled.")
@click.option("--kind", default="euclidean-origin", show_default=True,
              type=click.Choice(["euclidean-origin", "euclidean-axes"]),
              help="Cone of CSV inputs.")
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--reps", type=int, default=1000, show_default=True,
              help="Size of a sampled ensemble.")
@click.option("--r-grid", type=FloatList(), default="4,2,1",
              show_default=True, help="Decreasing radii.")
@click.option("--m-grid", type=FloatList(), default=None,
              help="Mass thresholds; default the Poisson (1 - level) "
              "quantiles of the PRM.")
@click.option("--level", type=float, default=1e-6, show_default=True)
@click.option("--box", "box_bound", type=float, default=1e6,
              show_default=True, help="Coordinate bound B of the compacts.")
@click.option("--eps", type=float, default=0.01, show_default=True)
@click.option("--eps-prime", type=float, default=None)
@seed_option
@out_option
@click.pass_context
def blp(ctx, inputs, kind, alpha, reps, r_grid, m_grid, level, box_bound,
        eps, eps_prime, seed, out):
    """
    Empirical tightness diagnostic of an ensemble of measures.
    """
    if not r_grid:
        abort(CONFIG_ERROR, "--r-grid needs at least one radius")
    with config_errors():
        mean = HomogeneousMeasure(euclidean_origin(1), alpha, [[1.0]], [1.0])
        if inputs:
            ensemble = [read_measure(path, kind) for path in inputs]
        else:
            spec = PrmSpec(mean, min(r_grid))
            ensemble = sample_replicates(spec, seed, reps)
        if m_grid is None:
            m_grid = tightness_thresholds(mean, r_grid, level)
        table = tightness_diagnostic(ensemble, r_grid, m_grid, box_bound, eps,
                                     eps_prime)
    params = dict(ctx.params, inputs=list(inputs), m_grid=list(m_grid))
    rows = TightnessRowSchema(many=True).dump(table.rows)
    document = envelope(ctx, params, seed, rows=rows, passed=table.passed)
    write_text(out, dumps(document))
