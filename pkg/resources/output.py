"""
This module contains the helpers shared by the command groups: option
decorators, error reporting and deterministic output files.
"""

import contextlib
import csv
import io
import json
import os
import tempfile

import click
import numpy as np
from marshmallow import ValidationError

from models.cone_space import SpaceDescriptor, make_product_space
from models.errors import InputError
from models.measures import AtomicMeasure
from schemas import MeasureSchema

CONFIG_ERROR = 2
FAILED_CHECK = 1

seed_option = click.option("--seed", type=int, default=0, show_default=True,
                           help="Master seed of every random stream.")
out_option = click.option("--out", type=click.Path(dir_okay=False),
                          default=None,
                          help="Output file; standard output when omitted.")
format_option = click.option("--format", "fmt",
                             type=click.Choice(["json", "csv"]),
                             default=None,
                             help="Defaults to csv for a .csv --out, "
                             "else json.")


class CommandError(click.ClickException):
    def __init__(self, message, exit_code):
        super().__init__(message)
        self.exit_code = exit_code


def abort(code, message):
    """
    Stop the command with ``message`` on stderr and exit status ``code``.
    """
    raise CommandError(message, code)


@contextlib.contextmanager
def config_errors():
    """
    Turn input problems raised inside the block into exit status 2.
    """
    try:
        yield
    except ValidationError as err:
        abort(CONFIG_ERROR, f"invalid configuration: {err.messages}")
    except json.JSONDecodeError as err:
        abort(CONFIG_ERROR, f"malformed JSON: {err}")
    except (InputError, OSError) as err:
        abort(CONFIG_ERROR, str(err))


def format_float(value):
    return format(float(value), ".17g")


def dumps(document):
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def envelope(ctx, config, seed, **payload):
    """
    Wrap a payload with the resolved config, the seed and the tool version.
    """
    document = {"config": config, "seed": seed,
                "version": ctx.obj["VERSION"]}
    document.update(payload)
    return document


def write_text(out, text):
    """
    Write ``text`` to ``out`` through a temporary file and a rename, or
    echo it when ``out`` is None.
    """
    if out is None:
        click.echo(text, nl=False)
        return
    directory = os.path.dirname(os.path.abspath(out))
    with tempfile.NamedTemporaryFile("w", dir=directory, delete=False,
                                     suffix=".tmp", newline="") as handle:
        handle.write(text)
        temp_name = handle.name
    os.replace(temp_name, out)


def measure_csv(measure, marks=None):
    """
    Atoms as CSV with header ``t?,x1..xd,w,mark?``.
    """
    space = measure.space
    header = (["t"] if space.has_time else []) + [
        f"x{i + 1}" for i in range(space.dim)] + ["w"]
    if marks is not None:
        header.append("mark")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for k, (location, weight) in enumerate(zip(measure.locations,
                                               measure.weights)):
        row = [format_float(v) for v in location] + [format_float(weight)]
        if marks is not None:
            row.append(str(marks[k]))
        writer.writerow(row)
    return buffer.getvalue()


def measure_json(measure):
    return MeasureSchema().dump(measure)


def read_measure(path, kind="euclidean-origin"):
    """
    Load a measure from a JSON document or a CSV atom table.

    A CSV carries no cone, so ``kind`` names the S space.
    """
    with open(path, newline="") as handle:
        text = handle.read()
    if not path.lower().endswith(".csv"):
        document = json.loads(text)
        # output of a previous command
        if isinstance(document, dict) and "measure" in document:
            document = document["measure"]
        return MeasureSchema().load(document)
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise InputError(f"{path} is empty")
    header = rows[0]
    if "w" not in header:
        raise InputError(f"{path} has no weight column")
    columns = [name for name in header if name.startswith("x")]
    space = SpaceDescriptor(kind, len(columns))
    if header and header[0] == "t":
        space = make_product_space(space)
        columns = ["t"] + columns
    index = [header.index(name) for name in columns]
    weight = header.index("w")
    body = [row for row in rows[1:] if row]
    try:
        locations = np.array([[float(row[i]) for i in index] for row in body])
        weights = np.array([float(row[weight]) for row in body])
    except (ValueError, IndexError) as err:
        raise InputError(f"{path}: bad atom row ({err})") from err
    return AtomicMeasure(space, locations.reshape(-1, space.point_size),
                         weights)


def write_measure(measure, out, fmt, document, marks=None):
    """
    Emit a measure: CSV atoms to ``out`` with the summary on stdout, or a
    single JSON document holding both.
    """
    if fmt is None:
        fmt = "csv" if out is not None and out.lower().endswith(".csv") \
            else "json"
    if fmt == "csv":
        write_text(out, measure_csv(measure, marks))
        if out is not None:
            click.echo(dumps(document), nl=False)
        return
    document = dict(document, measure=measure_json(measure))
    if marks is not None:
        document["marks"] = list(marks)
    write_text(out, dumps(document))
