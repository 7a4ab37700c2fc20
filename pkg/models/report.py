"""
This module contains the result records of the verification experiments.
"""

from dataclasses import dataclass, field
from typing import Optional

SCHEMA = "mo-pointproc/report-v1"

# |z| <= 4 and p >= 0.001 keep the false-failure rate of a ~20 check
# suite under 5% (union bound).
Z_LIMIT = 4.0
P_LIMIT = 1e-3
GAP_SLACK = 2.0


@dataclass
class TailRow:
    """
    Estimated mass of one tail set at one scale t.
    """
    scale: float
    set_index: int
    estimate: float
    std_error: float
    target: float
    finite_target: Optional[float]
    z: float
    z_finite: Optional[float]


@dataclass
class LaplaceRow:
    n: int
    function_index: int
    estimate: float
    std_error: float
    target: float
    z: float
    gap: float


@dataclass
class CountRow:
    """
    Count law of N_n(A) against Poisson(target).
    """
    n: int
    set_index: int
    mean: float
    target: float
    finite_target: Optional[float]
    p_value: float
    mean_z: float
    var_z: float
    observed: list
    expected: list


@dataclass
class LawRow:
    n: int
    function_index: int
    statistic: float
    p_value: float


@dataclass
class TightnessRow:
    r: float
    M: float
    tight1_fraction: float
    tight2_fraction: float
    tight1_ok: bool
    tight2_ok: bool


@dataclass
class ConvergenceReport:
    """
    Class representing the outcome of an experiment.

    Attributes:
        kind (str): "rv-check" or "complete-convergence".
        passed (bool): Overall acceptance flag.
        failures (list): Human-readable reasons when ``passed`` is false.
    """
    kind: str
    passed: bool = True
    tail_rows: list = field(default_factory=list)
    laplace_rows: list = field(default_factory=list)
    count_rows: list = field(default_factory=list)
    law_rows: list = field(default_factory=list)
    tightness_rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    thresholds: dict = field(default_factory=lambda: {
        "z": Z_LIMIT, "p": P_LIMIT, "gap_slack": GAP_SLACK})
    schema: str = SCHEMA

    def fail(self, reason):
        self.passed = False
        self.failures.append(reason)


def z_score(estimate, target, std_error):
    if std_error > 0:
        return (estimate - target) / std_error
    return 0.0 if estimate == target else float("inf")
