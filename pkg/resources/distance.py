"""
This module contains the distance command.
"""

import click

from models.mo_metric import mo_distance, prohorov_distance
from resources.output import (config_errors, dumps, envelope, out_option,
                              read_measure, write_text)


@click.command("distance")
@click.option("--a", "a_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--b", "b_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", default="euclidean-origin", show_default=True,
              type=click.Choice(["euclidean-origin", "euclidean-axes"]),
              help="Cone of CSV inputs.")
@out_option
@click.pass_context
def blp(ctx, a_path, b_path, kind, out):
    """
    Prohorov and d_{M_O} distances between two atomic measures.
    """
    with config_errors():
        mu = read_measure(a_path, kind)
        nu = read_measure(b_path, kind)
        prohorov = prohorov_distance(mu, nu).value
        mo = mo_distance(mu, nu)
    write_text(out, dumps(envelope(ctx, ctx.params, None, prohorov=prohorov,
                                   mo=mo)))
