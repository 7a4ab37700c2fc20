"""
Entry point of the application
"""

import logging
import os
import sys

import click
from dotenv import load_dotenv

from workers import pool
from resources.prm import blp as PrmBlp
from resources.distance import blp as DistanceBlp
from resources.rv import blp as RvBlp
from resources.converge import blp as ConvergeBlp
from resources.tightness import blp as TightnessBlp

VERSION = "1.0.0"


def create_app(threads=None):
    load_dotenv()

    # Configuration
    config = {
        "VERSION": VERSION,
        "THREADS": int(os.getenv("MO_PP_THREADS", "0"))
        if threads is None else threads,
        "LOG_LEVEL": os.getenv("MO_PP_LOG_LEVEL", "WARNING").upper(),
    }

    @click.group(context_settings={"help_option_names": ["-h", "--help"]})
    @click.version_option(VERSION, prog_name="mo-pointproc")
    @click.pass_context
    def app(ctx):
        """
        Point processes on cone-punctured spaces: d_{M_O} distances, Poisson
        random measures and complete convergence experiments.
        """
        ctx.obj = dict(config)
        logging.basicConfig(stream=sys.stderr, level=config["LOG_LEVEL"],
                            format="%(levelname)s %(name)s: %(message)s")
        pool.init_app(config["THREADS"])

    # Register the command groups
    app.add_command(PrmBlp)
    app.add_command(DistanceBlp)
    app.add_command(RvBlp)
    app.add_command(ConvergeBlp)
    app.add_command(TightnessBlp)

    return app


def run(argv=None, threads=None):
    """
    Run the command line and return the exit status.

    Args:
        argv (list): Arguments without the program name.
        threads (int): Overrides MO_PP_THREADS.

    Returns:
        int: 0 on success, 1 on a failed acceptance check, 2 on bad input.
    """
    command = create_app(threads)
    try:
        command.main(args=argv, prog_name="mo-pointproc",
                     standalone_mode=False)
    except click.exceptions.Exit as exit_:
        return exit_.exit_code
    except click.ClickException as err:
        err.show()
        return err.exit_code
    except click.Abort:
        return 1
    return 0


app = create_app()


if __name__ == "__main__":
    sys.exit(run())
