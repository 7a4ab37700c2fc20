"""
This module contains the prm command group: sampling, mapping and marking
Poisson random measures.
"""

import json
import logging

import click

from models.cone_space import euclidean_origin
from models.measures import HomogeneousMeasure
from models.prm import (BernoulliKernel, NormPower, PrmSpec, ScaleBy,
                        map_prm, mark_prm, sample_prm, sample_prm_annuli)
from resources.output import (CONFIG_ERROR, abort, config_errors, envelope,
                              format_option, out_option, read_measure,
                              seed_option, write_measure)
from schemas import HomogeneousMeasureSchema

logger = logging.getLogger(__name__)

blp = click.Group("prm", help="Operations on Poisson random measures.")

input_option = click.option("--input", "input_path", required=True,
                            type=click.Path(exists=True, dir_okay=False),
                            help="Measure as JSON or CSV.")
kind_option = click.option("--kind", default="euclidean-origin",
                           show_default=True,
                           type=click.Choice(["euclidean-origin",
                                              "euclidean-axes"]),
                           help="Cone of a CSV input.")


def _load_mean(mean_path, alpha, weight):
    if mean_path is None:
        return HomogeneousMeasure(euclidean_origin(1), alpha, [[1.0]],
                                  [weight])
    with open(mean_path) as handle:
        return HomogeneousMeasureSchema().load(json.load(handle))


@blp.command("sample")
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--weight", type=float, default=1.0, show_default=True,
              help="Angular mass of the default unit direction.")
@click.option("--mean", "mean_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Limit measure JSON; overrides --alpha and --weight.")
@click.option("--rmin", type=float, required=True,
              help="No atoms closer to the cone than this.")
@click.option("--horizon", type=float, default=None,
              help="Sample on [0, T] x S with mean dt x mu.")
@click.option("--rings", type=int, default=None,
              help="Sample ring by ring with this many rings.")
@click.option("--replicate", type=int, default=0, show_default=True)
@seed_option
@out_option
@format_option
@click.pass_context
def sample(ctx, alpha, weight, mean_path, rmin, horizon, rings, replicate,
           seed, out, fmt):
    """
    Sample one realisation of PRM(mu) above rmin.
    """
    with config_errors():
        mean = _load_mean(mean_path, alpha, weight)
        spec = PrmSpec(mean, rmin, horizon)
        if rings is None:
            measure = sample_prm(spec, seed, replicate)
        else:
            measure = sample_prm_annuli(spec, seed, rings, replicate)
    logger.info("prm sample: %d atoms", len(measure))
    document = envelope(ctx, ctx.params, seed, atoms=len(measure),
                        expected=spec.expected_count)
    write_measure(measure, out, fmt, document)


@blp.command("map")
@input_option
@kind_option
@click.option("--scale", type=float, default=None, help="x -> scale * x.")
@click.option("--power", type=float, default=None,
              help="Cone distance r -> r ** power.")
@out_option
@format_option
@click.pass_context
def map_command(ctx, input_path, kind, scale, power, out, fmt):
    """
    Push a measure through a mapping.
    """
    if (scale is None) == (power is None):
        abort(CONFIG_ERROR, "give exactly one of --scale and --power")
    with config_errors():
        measure = read_measure(input_path, kind)
        transform = ScaleBy(scale) if scale is not None else NormPower(power)
        mapped = map_prm(measure, transform)
    write_measure(mapped, out, fmt,
                  envelope(ctx, ctx.params, None, atoms=len(mapped)))


@blp.command("mark")
@input_option
@kind_option
@click.option("--q", type=float, required=True,
              help="Probability of mark 1.")
@click.option("--thin", is_flag=True,
              help="Only emit the atoms marked 1.")
@click.option("--replicate", type=int, default=0, show_default=True)
@seed_option
@out_option
@format_option
@click.pass_context
def mark(ctx, input_path, kind, q, thin, replicate, seed, out, fmt):
    """
    Attach independent Bernoulli(q) marks to every atom.
    """
    with config_errors():
        measure = read_measure(input_path, kind)
        marked = mark_prm(measure, BernoulliKernel(q), seed, replicate)
    if thin:
        kept = marked.thinned()
        document = envelope(ctx, ctx.params, seed, atoms=len(kept))
        write_measure(kept, out, fmt, document)
        return
    document = envelope(ctx, ctx.params, seed, atoms=len(measure))
    write_measure(measure, out, fmt, document, marks=marked.marks)
