"""
This file contains the schemas for the JSON documents read and written by
the command line.

``Plain*`` schemas validate a document and fill in defaults, which gives
the resolved configuration recorded in every output. The schemas deriving
from them also build the domain objects.
"""

import dataclasses
import math

from marshmallow import (Schema, ValidationError, fields, post_load,
                         pre_dump, validates_schema)
from marshmallow.validate import Length, OneOf, Range

from models.cone_space import (SpaceDescriptor, SpaceKind, euclidean_origin,
                               make_product_space)
from models.convergence import ExperimentConfig, TightnessSpec, \
    tightness_thresholds
from models.errors import InputError
from models.laplace import RampFunction, StepFunction
from models.measures import AtomicMeasure, HomogeneousMeasure, TailSet
from models.regvar import HeavyTailSampler, RadialLaw, ScalingMode

GROUND_KINDS = [SpaceKind.EUCLIDEAN_ORIGIN.value, SpaceKind.EUCLIDEAN_AXES.value]


def _build(factory, *args, **kwargs):
    """Run a domain constructor, reporting InputError as a ValidationError."""
    try:
        return factory(*args, **kwargs)
    except InputError as err:
        raise ValidationError(str(err)) from err


def _upper(u_hi):
    return math.inf if u_hi is None else u_hi


class PlainSpaceSchema(Schema):
    """
    This schema represents a space: the S factor and whether a time axis
    is attached.
    """
    kind = fields.Str(load_default=SpaceKind.EUCLIDEAN_ORIGIN.value,
                      validate=OneOf(GROUND_KINDS))
    dim = fields.Int(load_default=1, validate=Range(min=1))
    time = fields.Bool(load_default=False)


class SpaceSchema(PlainSpaceSchema):
    @post_load
    def make_space(self, data, **kwargs):
        space = _build(SpaceDescriptor, data["kind"], data["dim"])
        return make_product_space(space) if data["time"] else space

    @pre_dump
    def space_fields(self, space, **kwargs):
        if not isinstance(space, SpaceDescriptor):
            return space
        return {"kind": space.ground.kind.value, "dim": space.dim,
                "time": space.has_time}


class AtomSchema(Schema):
    """
    This schema represents one atom: location ``x`` and weight ``w``.
    """
    x = fields.List(fields.Float(allow_nan=False), required=True,
                    validate=Length(min=1))
    w = fields.Float(required=True, validate=Range(min=0, min_inclusive=False))


class MeasureSchema(Schema):
    """
    This schema represents a finite atomic measure.
    """
    space = fields.Nested(SpaceSchema(), required=True)
    atoms = fields.List(fields.Nested(AtomSchema()), load_default=list)

    @post_load
    def make_measure(self, data, **kwargs):
        atoms = [(atom["x"], atom["w"]) for atom in data["atoms"]]
        return _build(AtomicMeasure.from_atoms, data["space"], atoms)

    @pre_dump
    def measure_fields(self, measure, **kwargs):
        if not isinstance(measure, AtomicMeasure):
            return measure
        return {"space": measure.space,
                "atoms": [{"x": list(x), "w": w} for x, w in measure.atoms]}


class AngularSchema(Schema):
    omega = fields.List(fields.Float(allow_nan=False), required=True,
                        validate=Length(min=1))
    w = fields.Float(required=True, validate=Range(min=0, min_inclusive=False))


class PlainHomogeneousMeasureSchema(Schema):
    """
    This schema represents a homogeneous limit measure. The angular part
    defaults to a unit mass at +1 on the real line.
    """
    alpha = fields.Float(required=True,
                         validate=Range(min=0, min_inclusive=False))
    angular = fields.List(fields.Nested(AngularSchema()),
                          load_default=lambda: [{"omega": [1.0], "w": 1.0}],
                          validate=Length(min=1))
    space = fields.Nested(PlainSpaceSchema(), load_default=None,
                          allow_none=True)


def _make_homogeneous(data):
    space = data["space"]
    if space is None:
        space = euclidean_origin(len(data["angular"][0]["omega"]))
    elif space.has_time:
        raise ValidationError("a limit measure cannot carry a time axis")
    angular = [(a["omega"], a["w"]) for a in data["angular"]]
    return _build(HomogeneousMeasure.from_angular, space, data["alpha"],
                  angular)


class HomogeneousMeasureSchema(PlainHomogeneousMeasureSchema):
    space = fields.Nested(SpaceSchema(), load_default=None, allow_none=True)

    @post_load
    def make_measure(self, data, **kwargs):
        return _make_homogeneous(data)


class PlainSamplerSchema(PlainHomogeneousMeasureSchema):
    """
    This schema represents a heavy-tailed vector X = R * omega.
    """
    radial = fields.Str(load_default=RadialLaw.PURE_PARETO.value,
                        validate=OneOf([law.value for law in RadialLaw]))
    gamma = fields.Float(load_default=0.0)


class SamplerSchema(PlainSamplerSchema):
    space = fields.Nested(SpaceSchema(), load_default=None, allow_none=True)

    @post_load
    def make_sampler(self, data, **kwargs):
        limit = _make_homogeneous(data)
        return _build(HeavyTailSampler.from_measure, limit, data["radial"],
                      data["gamma"])


class PlainTailSetSchema(Schema):
    """
    This schema represents a tail set u_lo < cone_distance <= u_hi with
    optional direction indices and time window (t1, t2].
    """
    u_lo = fields.Float(required=True)
    u_hi = fields.Float(load_default=None, allow_none=True)
    directions = fields.List(fields.Int(validate=Range(min=0)),
                             load_default=None, allow_none=True)
    time = fields.List(fields.Float(), load_default=None, allow_none=True,
                       validate=Length(equal=2))


def _make_tail_set(data, time=None):
    window = data["time"] if data["time"] is not None else time
    return _build(TailSet, data["u_lo"], _upper(data["u_hi"]),
                  data["directions"], window)


class TailSetSchema(PlainTailSetSchema):
    @post_load
    def make_tail_set(self, data, **kwargs):
        return _make_tail_set(data)


class PieceSchema(PlainTailSetSchema):
    """
    This schema represents one piece c * 1_A of a step function.
    """
    c = fields.Float(required=True, validate=Range(min=0))


class PlainTestFunctionSchema(Schema):
    """
    This schema represents a test function. Steps list their pieces;
    ramps give the height ``c``, start ``r`` and width ``w``. A top-level
    ``time`` window applies to every piece without its own.
    """
    form = fields.Str(required=True, validate=OneOf(["step", "ramp"]))
    pieces = fields.List(fields.Nested(PieceSchema()), load_default=list)
    c = fields.Float(load_default=None, allow_none=True)
    r = fields.Float(load_default=None, allow_none=True)
    w = fields.Float(load_default=None, allow_none=True)
    time = fields.List(fields.Float(), load_default=None, allow_none=True,
                       validate=Length(equal=2))

    @validates_schema
    def validate_form(self, data, **kwargs):
        if data["form"] == "ramp":
            missing = [k for k in ("c", "r", "w") if data.get(k) is None]
            if missing:
                raise ValidationError(f"ramp needs {', '.join(missing)}")
        elif not data.get("pieces"):
            raise ValidationError("step function needs pieces")


class TestFunctionSchema(PlainTestFunctionSchema):
    __test__ = False

    @post_load
    def make_function(self, data, **kwargs):
        if data["form"] == "ramp":
            return _build(RampFunction, data["c"], data["r"], data["w"],
                          data["time"])
        pieces = [(_make_tail_set(piece, data["time"]), piece["c"])
                  for piece in data["pieces"]]
        return _build(StepFunction, tuple(pieces))


class TightnessSchema(Schema):
    """
    This schema represents the tightness diagnostic settings. Without
    ``M_grid`` the thresholds are the Poisson (1 - level) quantiles of the
    limit.
    """
    r_grid = fields.List(fields.Float(), required=True,
                         validate=Length(min=1))
    M_grid = fields.List(fields.Float(), load_default=None, allow_none=True)
    level = fields.Float(load_default=1e-6,
                         validate=Range(min=0, max=1, min_inclusive=False,
                                        max_inclusive=False))
    box_bound = fields.Float(required=True)
    eps = fields.Float(load_default=0.01)
    eps_prime = fields.Float(load_default=None, allow_none=True)


class PlainExperimentConfigSchema(Schema):
    """
    This schema represents a complete convergence experiment.
    """
    sampler = fields.Nested(PlainSamplerSchema(), required=True)
    n_grid = fields.List(fields.Int(validate=Range(min=1)), required=True,
                         validate=Length(min=1))
    reps = fields.Int(required=True, validate=Range(min=2))
    test_functions = fields.List(fields.Nested(PlainTestFunctionSchema()),
                                 load_default=list)
    tail_sets = fields.List(fields.Nested(PlainTailSetSchema()),
                            load_default=list)
    seed = fields.Int(load_default=0)
    scaling = fields.Str(load_default=None, allow_none=True,
                         validate=OneOf([mode.value for mode in ScalingMode]))
    tightness = fields.Nested(TightnessSchema(), load_default=None,
                              allow_none=True)
    law_test = fields.Bool(load_default=False)


class ExperimentConfigSchema(PlainExperimentConfigSchema):
    sampler = fields.Nested(SamplerSchema(), required=True)
    test_functions = fields.List(fields.Nested(TestFunctionSchema()),
                                 load_default=list)
    tail_sets = fields.List(fields.Nested(TailSetSchema()), load_default=list)

    @post_load
    def make_config(self, data, **kwargs):
        sampler = data["sampler"]
        limit = sampler.limit_measure()
        functions = [dataclasses.replace(f, reference=limit)
                     if isinstance(f, StepFunction) else f
                     for f in data["test_functions"]]
        tightness = data["tightness"]
        if tightness is not None:
            m_grid = tightness["M_grid"]
            if m_grid is None:
                m_grid = tightness_thresholds(limit, tightness["r_grid"],
                                              tightness["level"], 1.0)
            tightness = _build(TightnessSpec, tightness["r_grid"], m_grid,
                               tightness["box_bound"], tightness["eps"],
                               tightness["eps_prime"])
        return _build(ExperimentConfig, sampler, data["n_grid"],
                      data["reps"], functions, data["tail_sets"],
                      data["seed"], data["scaling"], tightness,
                      data["law_test"])


class TailRowSchema(Schema):
    scale = fields.Float()
    set_index = fields.Int()
    estimate = fields.Float()
    std_error = fields.Float()
    target = fields.Float()
    finite_target = fields.Float(allow_none=True)
    z = fields.Float()
    z_finite = fields.Float(allow_none=True)


class LaplaceRowSchema(Schema):
    n = fields.Int()
    function_index = fields.Int()
    estimate = fields.Float()
    std_error = fields.Float()
    target = fields.Float()
    z = fields.Float()
    gap = fields.Float()


class CountRowSchema(Schema):
    n = fields.Int()
    set_index = fields.Int()
    mean = fields.Float()
    target = fields.Float()
    finite_target = fields.Float(allow_none=True)
    p_value = fields.Float()
    mean_z = fields.Float()
    var_z = fields.Float()
    observed = fields.List(fields.Float())
    expected = fields.List(fields.Float())


class LawRowSchema(Schema):
    n = fields.Int()
    function_index = fields.Int()
    statistic = fields.Float()
    p_value = fields.Float()


class TightnessRowSchema(Schema):
    r = fields.Float()
    M = fields.Float()
    tight1_fraction = fields.Float()
    tight2_fraction = fields.Float()
    tight1_ok = fields.Bool()
    tight2_ok = fields.Bool()


class ReportSchema(Schema):
    """
    This schema represents a convergence report.
    """
    schema = fields.Str()
    kind = fields.Str()
    passed = fields.Bool(data_key="pass")
    thresholds = fields.Dict(keys=fields.Str(), values=fields.Float())
    failures = fields.List(fields.Str())
    tail_rows = fields.List(fields.Nested(TailRowSchema()))
    laplace_rows = fields.List(fields.Nested(LaplaceRowSchema()))
    count_rows = fields.List(fields.Nested(CountRowSchema()))
    law_rows = fields.List(fields.Nested(LawRowSchema()))
    tightness_rows = fields.List(fields.Nested(TightnessRowSchema()))
