"""Dimensioning of almost blank subframes (ABSF) in two-tier HetNets.

The package couples a stochastic-geometry analysis of victim-UE outage
(success probabilities, round-robin resource shares) with a planner
that turns a minimum victim bit rate into the number of ABSFs per
frame, and a snapshot Monte Carlo simulator that cross-validates the
analytics and measures scheduler-level throughput.
"""

from .planner import PlanResult, SweepCurve, required_absf, sweep
from .scenario import (
    ScenarioKind,
    ScenarioParams,
    SubframeKind,
    VictimDistanceMode,
    default_macro_femto,
    default_macro_pico,
)
from .sim import (
    Scheduler,
    SimConfig,
    ThroughputStudy,
    estimate_success_probability,
    simulate,
)
from .success import success_probability

__version__ = "0.1.0"

__all__ = [
    "PlanResult",
    "Scheduler",
    "ScenarioKind",
    "ScenarioParams",
    "SimConfig",
    "SubframeKind",
    "SweepCurve",
    "ThroughputStudy",
    "VictimDistanceMode",
    "default_macro_femto",
    "default_macro_pico",
    "estimate_success_probability",
    "required_absf",
    "simulate",
    "success_probability",
    "sweep",
    "__version__",
]
