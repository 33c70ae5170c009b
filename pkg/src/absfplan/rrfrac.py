"""Round-robin resource fractions from Poisson Voronoi cell areas.

A victim UE's long-run share of its cell's resource blocks under round
robin is 1/L where L is the number of contending UEs.  Averaging 1/L
over the Poisson number of UEs in the cell and over the cell-area
distribution gives the round-robin fraction

    omega_bar = C * int (1 - exp(-lambda_u x)) f_A(x) dx,
    1/C       = int lambda_u x f_A(x) dx,

with f_A the area density of the relevant serving region:

    MF NSF  -- macro Voronoi cell conditioned on hosting a victim
               (all UEs contend in normal subframes)
    MF ABSF -- same cell scaled by the victim probability
               (only victims contend in blanked subframes)
    MP NSF  -- pico serving region from the macro cell, scaled by the
               pico association probability
    MP ABSF -- pico serving region scaled by the victim probability

The unconditioned macro Voronoi area follows the standard Gamma(7/2)
approximation with unit mean 1/lambda_m.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable

from .scenario import ScenarioKind, ScenarioParams, SubframeKind, victim_probability
from .specfun import QuadratureSpec, integrate

_GAMMA_SHAPE = 3.5
_GAMMA_CONST = (343.0 / 15.0) * math.sqrt(3.5 / math.pi)  # (343/15) sqrt(7/(2 pi))


class AreaLabel(enum.Enum):
    """Which serving-region law an area distribution describes."""

    MF_NSF = "mf_nsf"
    MF_ABSF = "mf_absf"
    MP_NSF = "mp_nsf"
    MP_ABSF = "mp_absf"
    RAW_VORONOI = "raw_voronoi"


def voronoi_area_pdf(lam: float, x: float) -> float:
    """Gamma approximation of the area density of a Poisson Voronoi cell."""
    if lam <= 0.0:
        raise ValueError("intensity must be positive")
    if x <= 0.0:
        return 0.0
    y = lam * x
    return lam * _GAMMA_CONST * y**2.5 * math.exp(-3.5 * y)


def _laplace_gamma(c_over_lam: float, order: float = _GAMMA_SHAPE) -> float:
    """E[exp(-c X)] for X ~ the area law above, c expressed as c/lambda."""
    return (1.0 + c_over_lam / _GAMMA_SHAPE) ** (-order)


@dataclass(frozen=True)
class AreaDistribution:
    """Normalized area density on (0, inf) with a truncation bound."""

    pdf: Callable[[float], float]
    upper: float
    label: AreaLabel = AreaLabel.RAW_VORONOI


def _victim_weighted(params: ScenarioParams, p_victim: float) -> AreaDistribution:
    """Macro cell area biased by P{cell hosts at least one victim}."""
    lam = params.lambda_m
    rate = p_victim * params.lambda_u
    norm = 1.0 - _laplace_gamma(rate / lam)

    def pdf(x: float) -> float:
        if x <= 0.0:
            return 0.0
        return -math.expm1(-rate * x) * voronoi_area_pdf(lam, x) / norm

    return AreaDistribution(pdf=pdf, upper=18.0 / lam)


def _scaled(base: AreaDistribution, scale: float) -> AreaDistribution:
    """Distribution of X / scale for X ~ base (area shrunk by `scale`)."""

    def pdf(x: float) -> float:
        return scale * base.pdf(scale * x)

    return AreaDistribution(pdf=pdf, upper=base.upper / scale)


def pico_association_probability(params: ScenarioParams) -> float:
    """P{UE associates to the pico tier} under range expansion."""
    if params.kind is not ScenarioKind.MACRO_PICO:
        raise ValueError("pico association applies to macro/pico only")
    x = params.k1**2 * params.lambda_s
    return x / (x + params.lambda_m)


_AREA_LABELS = {
    (ScenarioKind.MACRO_FEMTO, SubframeKind.NSF): AreaLabel.MF_NSF,
    (ScenarioKind.MACRO_FEMTO, SubframeKind.ABSF): AreaLabel.MF_ABSF,
    (ScenarioKind.MACRO_PICO, SubframeKind.NSF): AreaLabel.MP_NSF,
    (ScenarioKind.MACRO_PICO, SubframeKind.ABSF): AreaLabel.MP_ABSF,
}


def conditioned_area_pdf(params: ScenarioParams, kind: SubframeKind) -> AreaDistribution:
    """Serving-region area density seen by a victim for the given subframe kind."""
    p_victim = victim_probability(params)
    if p_victim <= 0.0:
        raise ValueError("victim probability is zero, area distribution degenerates")
    label = _AREA_LABELS[params.kind, kind]
    if params.kind is ScenarioKind.MACRO_FEMTO:
        base = _victim_weighted(params, p_victim)
        if kind is SubframeKind.NSF:
            return replace(base, label=label)
        # In ABSFs only victims contend; the victim sub-area of the cell
        # is the full area thinned by the victim probability.
        return replace(_scaled(base, 1.0 / p_victim), label=label)
    base = _victim_weighted(params, p_victim)
    # The macro-cell area maps to the per-pico serving area: thin by the
    # association (NSF) or victim (ABSF) probability, then split among
    # the average number of picocells inside the macro cell.
    picos_per_macro = params.lambda_s / params.lambda_m
    if kind is SubframeKind.NSF:
        scale = picos_per_macro / pico_association_probability(params)
    else:
        scale = picos_per_macro / p_victim
    return replace(_scaled(base, scale), label=label)


def omega_bar(
    dist: AreaDistribution, lambda_u: float, spec: QuadratureSpec | None = None
) -> float:
    """Round-robin fraction of one victim for contender density lambda_u."""
    if lambda_u <= 0.0:
        raise ValueError("contender density must be positive")
    numerator = integrate(
        lambda x: -math.expm1(-lambda_u * x) * dist.pdf(x), 0.0, dist.upper, spec
    )
    denominator = integrate(lambda x: lambda_u * x * dist.pdf(x), 0.0, dist.upper, spec)
    return numerator / denominator


def omega_mf_closed(params: ScenarioParams, kind: SubframeKind) -> float:
    """Closed-form macro/femto round-robin fraction (NSF and ABSF)."""
    if params.kind is not ScenarioKind.MACRO_FEMTO:
        raise ValueError("closed form applies to macro/femto only")
    lam = params.lambda_m
    lu = params.lambda_u
    p = victim_probability(params)
    if kind is SubframeKind.NSF:
        g = lambda c: _laplace_gamma(c / lam)
        numerator = 1.0 - g(lu) - g(p * lu) + g((1.0 + p) * lu)
        denominator = (lu / lam) * (1.0 - _laplace_gamma(p * lu / lam, 4.5))
        return numerator / denominator
    s4 = lam / p  # 7*s4 is the decay rate of the victim-area density
    a = (
        (7.0 * s4) ** -3.5
        - 2.0 * (7.0 * s4 + 2.0 * lu) ** -3.5
        + (7.0 * s4 + 4.0 * lu) ** -3.5
    )
    b = (7.0 * s4) ** -4.5 - (7.0 * s4 + 2.0 * lu) ** -4.5
    return a / (7.0 * lu * b)
