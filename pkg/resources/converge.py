"""
This module contains the converge command group.
"""

import json
import logging

import click

from models.convergence import complete_convergence_experiment
from resources.output import (FAILED_CHECK, abort, config_errors, dumps,
                              envelope, out_option, write_text)
from schemas import (ExperimentConfigSchema, PlainExperimentConfigSchema,
                     ReportSchema)

logger = logging.getLogger(__name__)

blp = click.Group("converge", help="Complete convergence experiments.")


@blp.command("complete")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Experiment configuration JSON.")
@click.option("--seed", type=int, default=None,
              help="Overrides the seed of the configuration.")
@out_option
@click.pass_context
def complete(ctx, config_path, seed, out):
    """
    Run the complete convergence experiment described by a config file.

    Exits with status 1 when the acceptance check fails; the report is
    written first.
    """
    with config_errors():
        with open(config_path) as handle:
            raw = json.load(handle)
        if seed is not None and isinstance(raw, dict):
            raw = dict(raw, seed=seed)
        resolved = PlainExperimentConfigSchema().load(raw)
        cfg = ExperimentConfigSchema().load(raw)
        logger.info("complete convergence: n_grid=%s reps=%d", cfg.n_grid,
                    cfg.reps)
        report = complete_convergence_experiment(cfg)
    document = envelope(ctx, resolved, cfg.seed,
                        report=ReportSchema().dump(report))
    write_text(out, dumps(document))
    if not report.passed:
        abort(FAILED_CHECK, "; ".join(report.failures))
