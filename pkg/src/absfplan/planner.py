"""ABSF dimensioning: victim outage throughput and required blank-subframe count.

The mean outage throughput of a victim UE in one subframe kind is

    C = n_rb * rb_bandwidth * log2(1 + theta0) * P{SIR > theta0} * omega_bar

and a frame with n ABSFs out of n_sf subframes mixes the two kinds
linearly.  The planner solves the mix for the smallest integer n that
meets the victim target c_v_min, clamped to [0, n_sf].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .rrfrac import conditioned_area_pdf, omega_bar, omega_mf_closed
from .scenario import ScenarioKind, ScenarioParams, SubframeKind, victim_probability
from .specfun import QuadratureSpec
from .success import success_probability

_SNAP = 1e-9  # ratios this close to an integer are treated as exact

SWEEP_PARAMETERS = ("lambda_s", "lambda_u", "rho_a", "margin", "bias", "c_v_min")


def spectral_efficiency(params: ScenarioParams) -> float:
    """Outage spectral efficiency log2(1 + theta0) in bit/s/Hz."""
    return math.log2(1.0 + params.theta0)


def victim_share(
    params: ScenarioParams, kind: SubframeKind, spec: QuadratureSpec | None = None
) -> float:
    """Round-robin fraction of a victim; closed form for macro/femto."""
    if params.kind is ScenarioKind.MACRO_FEMTO:
        return omega_mf_closed(params, kind)
    return omega_bar(conditioned_area_pdf(params, kind), params.lambda_u, spec)


def outage_throughput(
    params: ScenarioParams,
    kind: SubframeKind,
    success: float | None = None,
    share: float | None = None,
    spec: QuadratureSpec | None = None,
) -> float:
    """Mean victim outage throughput in bit/s for one subframe kind."""
    if success is None:
        success = success_probability(params, kind, spec=spec)
    if share is None:
        share = victim_share(params, kind, spec)
    return params.n_rb * params.rb_bandwidth * spectral_efficiency(params) * success * share


def mixed_outage_throughput(
    params: ScenarioParams, n_absf: int, spec: QuadratureSpec | None = None
) -> float:
    """Victim outage throughput of a frame with n_absf blank subframes."""
    if not 0 <= n_absf <= params.n_sf:
        raise ValueError(f"n_absf must lie in [0, {params.n_sf}]")
    c_nsf = outage_throughput(params, SubframeKind.NSF, spec=spec)
    c_absf = outage_throughput(params, SubframeKind.ABSF, spec=spec)
    return (n_absf * c_absf + (params.n_sf - n_absf) * c_nsf) / params.n_sf


@dataclass(frozen=True)
class PlanResult:
    """Planner output for one parameter set."""

    params: ScenarioParams
    n_absf: int
    feasible: bool
    c_nsf: float  # victim outage throughput, all-NSF frame, bit/s
    c_absf: float  # victim outage throughput, all-ABSF frame, bit/s
    c_mixed: float  # victim outage throughput at n_absf, bit/s
    success_nsf: float
    success_absf: float
    share_nsf: float
    share_absf: float


def required_absf(params: ScenarioParams, spec: QuadratureSpec | None = None) -> PlanResult:
    """Smallest ABSF count whose frame mix meets the victim target c_v_min."""
    if victim_probability(params) == 0.0:
        # No small cells means no victims and nothing to protect; the
        # per-victim means are undefined, so report them as NaN.
        nan = math.nan
        return PlanResult(
            params=params,
            n_absf=0,
            feasible=True,
            c_nsf=nan,
            c_absf=nan,
            c_mixed=nan,
            success_nsf=nan,
            success_absf=nan,
            share_nsf=nan,
            share_absf=nan,
        )
    success_nsf = success_probability(params, SubframeKind.NSF, spec=spec)
    success_absf = success_probability(params, SubframeKind.ABSF, spec=spec)
    share_nsf = victim_share(params, SubframeKind.NSF, spec)
    share_absf = victim_share(params, SubframeKind.ABSF, spec)
    peak = params.n_rb * params.rb_bandwidth * spectral_efficiency(params)
    c_nsf = peak * success_nsf * share_nsf
    c_absf = peak * success_absf * share_absf

    target = params.c_v_min
    if target <= c_nsf:
        n = 0
    elif c_absf <= c_nsf:
        n = params.n_sf  # blanking does not help; report the saturated frame
    else:
        ratio = params.n_sf * (target - c_nsf) / (c_absf - c_nsf)
        if abs(ratio - round(ratio)) < _SNAP:
            ratio = round(ratio)
        n = min(math.ceil(ratio), params.n_sf)
    c_mixed = (n * c_absf + (params.n_sf - n) * c_nsf) / params.n_sf
    feasible = c_mixed >= target - 1e-9
    return PlanResult(
        params=params,
        n_absf=n,
        feasible=feasible,
        c_nsf=c_nsf,
        c_absf=c_absf,
        c_mixed=c_mixed,
        success_nsf=success_nsf,
        success_absf=success_absf,
        share_nsf=share_nsf,
        share_absf=share_absf,
    )


def apply_sweep_value(params: ScenarioParams, parameter: str, value: float) -> ScenarioParams:
    """Parameter set for one sweep point.

    margin and bias rescale the configured DI coefficients through the
    power-ratio law, so a table-calibrated coefficient keeps its
    calibration at the sweep anchor (margin 1, configured bias).
    """
    if parameter == "lambda_s":
        return replace(params, lambda_s=value)
    if parameter == "lambda_u":
        return replace(params, lambda_u=value)
    if parameter == "rho_a":
        return replace(params, rho_a=value)
    if parameter == "c_v_min":
        return replace(params, c_v_min=value)
    exponent = 2.0 / (params.alpha_m + params.alpha_s)
    if parameter == "margin":
        if value <= 0.0:
            raise ValueError("margin must be positive")
        factor = value**-exponent
        if params.kind is ScenarioKind.MACRO_FEMTO:
            return replace(params, k=params.k * factor)
        k2 = params.k2 * factor
        if k2 >= params.k1:
            raise ValueError(f"margin {value!r} pushes k2 above k1")
        return replace(params, k2=k2)
    if parameter == "bias":
        if params.kind is not ScenarioKind.MACRO_PICO:
            raise ValueError("bias sweeps apply to macro/pico only")
        if value <= 0.0:
            raise ValueError("bias must be positive")
        k1 = params.k1 * (value / params.bias) ** exponent
        if k1 <= params.k2:
            raise ValueError(f"bias {value!r} pushes k1 below k2")
        return replace(params, k1=k1, bias=value)
    raise ValueError(f"unknown sweep parameter {parameter!r}; use one of {SWEEP_PARAMETERS}")


@dataclass(frozen=True)
class SweepCurve:
    """Planner results along one swept parameter."""

    parameter: str
    values: tuple[float, ...]
    results: tuple[PlanResult, ...]

    @property
    def n_absf(self) -> tuple[int, ...]:
        return tuple(r.n_absf for r in self.results)

    def rows(self):
        """(param_value, n_absf, c_nsf_bps, c_absf_bps) per sweep point."""
        for value, result in zip(self.values, self.results):
            yield value, result.n_absf, result.c_nsf, result.c_absf


def sweep(
    params: ScenarioParams,
    parameter: str,
    values: Sequence[float],
    spec: QuadratureSpec | None = None,
) -> SweepCurve:
    """Run the planner across a grid of one scenario parameter."""
    values = tuple(float(v) for v in values)
    if not values:
        raise ValueError("sweep needs at least one value")
    results = tuple(
        required_absf(apply_sweep_value(params, parameter, v), spec) for v in values
    )
    return SweepCurve(parameter=parameter, values=values, results=results)
