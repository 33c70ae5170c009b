"""Victim SIR success probabilities for both deployments.

The SIR of a victim UE served at distance r decomposes the interference
into three independent contributions, each with its own Laplace factor
under Rayleigh fading:

    own tier    -- co-tier interferers of the serving tier (never blanked)
    cross tier  -- the other tier outside the dominant-interferer region
    DI          -- the dominant interferers themselves (>= 1 by victim
                   conditioning), averaged over their random count

P{SIR > theta0} is the product of the three factors integrated against
the victim-conditioned serving-distance density.  In ABSFs the blanked
tier (femto in macro/femto, macro in macro/pico) is scaled by the
residue rho_a; NSF is the same expression with scale 1.

With full load the DI average uses the exact generating function of the
zero-truncated Poisson DI count; for fractional load the factor for one
DI is raised to load * mean count, which is accurate whenever the
single-DI factor is close to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scenario import (
    ScenarioKind,
    ScenarioParams,
    SubframeKind,
    VictimDistanceMode,
    mean_di_count,
    victim_distance_pdf,
    victim_distance_upper,
)
from .specfun import QuadratureSpec, gauss_2f1, integrate, rho


def laplace_own_tier(
    params: ScenarioParams,
    r: float,
    scale: float = 1.0,
    spec: QuadratureSpec | None = None,
) -> float:
    """Laplace factor of the serving tier's co-tier interference at distance r."""
    if r < 0.0:
        raise ValueError("distance must be non-negative")
    if params.kind is ScenarioKind.MACRO_FEMTO:
        load, lam, alpha = params.load_m, params.lambda_m, params.alpha_m
    else:
        load, lam, alpha = params.load_s, params.lambda_s, params.alpha_s
    attenuation = rho(params.theta0 * scale, alpha, spec)
    return math.exp(-math.pi * load * lam * r * r * attenuation)


def laplace_cross_tier(
    params: ScenarioParams,
    r: float,
    kind: SubframeKind,
    spec: QuadratureSpec | None = None,
) -> float:
    """Laplace factor of the non-dominant part of the other tier."""
    if r < 0.0:
        raise ValueError("distance must be non-negative")
    if r == 0.0:
        return 1.0
    a = params.residue(kind)
    if params.kind is ScenarioKind.MACRO_FEMTO:
        gamma = (
            params.theta0
            * a
            * params.p_s
            * r**params.alpha_m
            / (params.k**params.alpha_s * params.p_m * r**params.alpha_s)
        )
        coef = params.load_s * params.k**2 * params.lambda_s
        alpha = params.alpha_s
    else:
        gamma = (
            params.theta0
            * params.k2**params.alpha_m
            * a
            * params.p_m
            * r**params.alpha_s
            / (params.p_s * r**params.alpha_m)
        )
        coef = params.load_m * params.lambda_m / params.k2**2
        alpha = params.alpha_m
    return math.exp(-math.pi * coef * r * r * rho(gamma, alpha, spec))


def laplace_di_single(params: ScenarioParams, r: float, kind: SubframeKind) -> float:
    """Fading average of the interference factor of one dominant interferer."""
    if r <= 0.0:
        raise ValueError("distance must be positive")
    a = params.residue(kind)
    if params.kind is ScenarioKind.MACRO_FEMTO:
        alpha = params.alpha_s
        z = -(
            params.k**alpha
            * params.p_m
            * r**alpha
            / (params.theta0 * a * params.p_s * r**params.alpha_m)
        )
        return 1.0 - gauss_2f1(1.0, 2.0 / alpha, (2.0 + alpha) / alpha, z)
    alpha = params.alpha_m
    k1sq, k2sq = params.k1**2, params.k2**2
    base = params.theta0 * a * params.p_m * r**params.alpha_s / (params.p_s * r**alpha)
    b = -2.0 / alpha
    c = (alpha - 2.0) / alpha
    f_inner = gauss_2f1(1.0, b, c, -(params.k2**alpha) * base)
    f_outer = gauss_2f1(1.0, b, c, -(params.k1**alpha) * base)
    return (k1sq * f_inner - k2sq * f_outer) / (k1sq - k2sq)


def _di_count_coefficient(params: ScenarioParams, r: float) -> float:
    """Exponent pi * lambda * area-factor * r^2 of the DI-count distribution."""
    if params.kind is ScenarioKind.MACRO_FEMTO:
        return math.pi * params.k**2 * params.lambda_s * r * r
    return math.pi * params.lambda_m * (1.0 / params.k2**2 - 1.0 / params.k1**2) * r * r


def _di_pgf(single: float, count_coef: float) -> float:
    """Exact zero-truncated Poisson average of single^N, in log space."""
    if count_coef < 1e-12:
        return single
    if single == 0.0:
        return 0.0
    log_value = (
        count_coef * (single - 1.0)
        + math.log(-math.expm1(-count_coef * single))
        - math.log(-math.expm1(-count_coef))
    )
    return math.exp(log_value)


def laplace_di(params: ScenarioParams, r: float, kind: SubframeKind) -> float:
    """Laplace factor of all dominant interferers of a victim at distance r.

    Full load uses the exact count-PGF expression; fractional load uses
    the mean-count power approximation single^(load * mean_count).
    """
    single = laplace_di_single(params, r, kind)
    load = params.load_s if params.kind is ScenarioKind.MACRO_FEMTO else params.load_m
    if load == 1.0:
        return _di_pgf(single, _di_count_coefficient(params, r))
    if single <= 0.0:
        return 0.0
    return single ** (load * mean_di_count(params, r))


@dataclass(frozen=True)
class InterferenceTerms:
    """The three Laplace factors at one serving distance."""

    own_tier: float
    cross_tier: float
    di: float

    @property
    def product(self) -> float:
        return self.own_tier * self.cross_tier * self.di


def interference_terms(
    params: ScenarioParams,
    r: float,
    kind: SubframeKind,
    spec: QuadratureSpec | None = None,
) -> InterferenceTerms:
    return InterferenceTerms(
        own_tier=laplace_own_tier(params, r, 1.0, spec),
        cross_tier=laplace_cross_tier(params, r, kind, spec),
        di=laplace_di(params, r, kind),
    )


def success_probability(
    params: ScenarioParams,
    kind: SubframeKind,
    mode: VictimDistanceMode = VictimDistanceMode.ONE_PLUS_DI,
    spec: QuadratureSpec | None = None,
) -> float:
    """P{SIR > theta0} for a victim UE, averaged over its serving distance."""
    if mode is VictimDistanceMode.SINGLE_DI and params.kind is not ScenarioKind.MACRO_FEMTO:
        raise ValueError("single-DI conditioning applies to macro/femto only")
    if params.kind is ScenarioKind.MACRO_FEMTO:
        own_load, own_lambda, own_alpha = params.load_m, params.lambda_m, params.alpha_m
    else:
        own_load, own_lambda, own_alpha = params.load_s, params.lambda_s, params.alpha_s
    own_rho = rho(params.theta0, own_alpha, spec)
    own_coef = math.pi * own_load * own_lambda * own_rho

    def integrand(r: float) -> float:
        if r <= 0.0:
            return 0.0
        density = victim_distance_pdf(params, r, mode)
        if density == 0.0:
            return 0.0
        own = math.exp(-own_coef * r * r)
        cross = laplace_cross_tier(params, r, kind, spec)
        if mode is VictimDistanceMode.SINGLE_DI:
            di = laplace_di_single(params, r, kind)
        else:
            di = laplace_di(params, r, kind)
        return own * cross * di * density

    upper = victim_distance_upper(params, mode)
    return integrate(integrand, 0.0, upper, spec)


def success_mf_single_di_closed(
    params: ScenarioParams, kind: SubframeKind = SubframeKind.ABSF
) -> float:
    """Closed-form single-DI macro/femto success probability.

    Valid only for equal path loss exponents and full load on both
    tiers, where the serving-distance integral collapses.
    """
    if params.kind is not ScenarioKind.MACRO_FEMTO:
        raise ValueError("closed form applies to macro/femto only")
    if params.alpha_m != params.alpha_s:
        raise ValueError("closed form requires alpha_m == alpha_s")
    if params.load_m != 1.0 or params.load_s != 1.0:
        raise ValueError("closed form requires full load on both tiers")
    alpha = params.alpha_m
    a = params.residue(kind)
    mu = params.k**2 * params.lambda_s + params.lambda_m
    z = -(params.k**alpha) * params.p_m / (params.theta0 * a * params.p_s)
    numerator = mu**2 * (1.0 - gauss_2f1(1.0, 2.0 / alpha, (2.0 + alpha) / alpha, z))
    gamma_cross = params.theta0 * a * params.p_s / (params.k**alpha * params.p_m)
    denominator = (
        params.lambda_m * (1.0 + rho(params.theta0, alpha))
        + params.k**2 * params.lambda_s * (1.0 + rho(gamma_cross, alpha))
    ) ** 2
    return numerator / denominator
