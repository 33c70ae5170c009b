"""Deployment scenario parameters and geometry-level distributions.

Two deployments are covered, both with a homogeneous PPP macro tier and
a homogeneous PPP small-cell tier:

  * macro/femto: closed-access femtocells; macro UEs near a femtocell are
    interference victims, and the femto tier is the one silenced in
    almost-blank subframes (ABSFs).
  * macro/pico: open-access picocells with cell range expansion; UEs
    pushed onto a picocell by the association bias are victims of the
    macro tier, which is the silenced one.

The "dominant interferer" (DI) rules are distance ratios: in macro/femto
a femtocell at r_f dominates a macro UE served at r_m iff r_f < k * r_m;
in macro/pico a UE associates to the pico tier iff r_p < k1 * r_m and is
a victim iff additionally r_p > k2 * r_m.

All quantities here are linear: watts, plain ratios, 1/m^2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .units import db_to_linear, dbm_to_watt


class ScenarioKind(enum.Enum):
    MACRO_FEMTO = "macro_femto"
    MACRO_PICO = "macro_pico"


class SubframeKind(enum.Enum):
    NSF = "nsf"
    ABSF = "absf"


class VictimDistanceMode(enum.Enum):
    """Conditioning of the serving-distance density of a victim UE."""

    SINGLE_DI = "single_di"
    ONE_PLUS_DI = "one_plus_di"


def di_coefficient(
    p_num: float, p_den: float, alpha_a: float, alpha_b: float, bias: float = 1.0
) -> float:
    """Distance-ratio coefficient (bias * p_num / p_den)^(2 / (alpha_a + alpha_b))."""
    if min(p_num, p_den, bias) <= 0.0:
        raise ValueError("powers and bias must be positive")
    return (bias * p_num / p_den) ** (2.0 / (alpha_a + alpha_b))


@dataclass(frozen=True)
class ScenarioParams:
    """Input parameter set for one deployment.

    lambda_s / p_s / alpha_s / load_s describe the small-cell tier
    (femto or pico depending on kind).  k applies to macro/femto;
    k1 > k2 apply to macro/pico.  bias, rho_a and theta0 are linear.
    """

    kind: ScenarioKind
    lambda_m: float  # macro BS density, 1/m^2
    lambda_u: float  # UE density, 1/m^2
    lambda_s: float  # small-cell BS density, 1/m^2
    p_m: float  # macro transmit power, W
    p_s: float  # small-cell transmit power, W
    alpha_m: float
    alpha_s: float
    load_m: float
    load_s: float
    theta0: float  # SIR threshold, linear
    rho_a: float  # ABSF residue interference, linear
    n_sf: int = 10
    n_rb: int = 25
    rb_bandwidth: float = 180e3  # Hz
    c_v_min: float = 0.0  # victim throughput target, bit/s
    k: float | None = None
    k1: float | None = None
    k2: float | None = None
    bias: float = 1.0

    def __post_init__(self) -> None:
        for name in ("lambda_m", "lambda_u", "p_m", "p_s", "alpha_m", "alpha_s", "theta0"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.lambda_s < 0.0:
            raise ValueError("lambda_s must be non-negative")
        if self.alpha_m <= 2.0 or self.alpha_s <= 2.0:
            raise ValueError("path loss exponents must exceed 2")
        for name in ("load_m", "load_s"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not 0.0 <= self.rho_a <= 1.0:
            raise ValueError("rho_a must lie in [0, 1]")
        if self.n_sf < 1 or self.n_rb < 1:
            raise ValueError("n_sf and n_rb must be at least 1")
        if self.rb_bandwidth <= 0.0:
            raise ValueError("rb_bandwidth must be positive")
        if self.kind is ScenarioKind.MACRO_FEMTO:
            if self.k is None or self.k <= 0.0:
                raise ValueError("macro/femto scenario requires k > 0")
        else:
            if self.k1 is None or self.k2 is None:
                raise ValueError("macro/pico scenario requires k1 and k2")
            if not self.k1 > self.k2 > 0.0:
                raise ValueError("macro/pico scenario requires k1 > k2 > 0")

    def residue(self, kind: SubframeKind) -> float:
        """Interference scale of the silenced tier: rho_a in ABSFs, 1 in NSFs."""
        return self.rho_a if kind is SubframeKind.ABSF else 1.0


def derived_coefficients(params: ScenarioParams) -> ScenarioParams:
    """Replace the DI coefficients by their power-ratio formula values."""
    if params.kind is ScenarioKind.MACRO_FEMTO:
        k = di_coefficient(params.p_s, params.p_m, params.alpha_m, params.alpha_s)
        return replace(params, k=k)
    k1 = di_coefficient(params.p_s, params.p_m, params.alpha_m, params.alpha_s, params.bias)
    k2 = di_coefficient(params.p_s, params.p_m, params.alpha_m, params.alpha_s)
    return replace(params, k1=k1, k2=k2)


def victim_probability(params: ScenarioParams) -> float:
    """Probability that a randomly placed UE is a victim."""
    if params.kind is ScenarioKind.MACRO_FEMTO:
        x = params.k**2 * params.lambda_s
        return x / (x + params.lambda_m)
    lm = params.lambda_m
    return lm / (lm + params.k2**2 * params.lambda_s) - lm / (
        lm + params.k1**2 * params.lambda_s
    )


def single_di_probability(params: ScenarioParams) -> float:
    """Macro/femto probability of having exactly one dominant interferer."""
    if params.kind is not ScenarioKind.MACRO_FEMTO:
        raise ValueError("single-DI probability is defined for macro/femto only")
    x = params.k**2 * params.lambda_s
    return x * params.lambda_m / (x + params.lambda_m) ** 2


def victim_distance_pdf(
    params: ScenarioParams,
    r: float,
    mode: VictimDistanceMode = VictimDistanceMode.ONE_PLUS_DI,
) -> float:
    """Density of the serving distance of a victim UE (conditioned on victim status)."""
    if r < 0.0:
        raise ValueError("distance must be non-negative")
    if params.kind is ScenarioKind.MACRO_FEMTO:
        mu = params.k**2 * params.lambda_s + params.lambda_m
        if mode is VictimDistanceMode.SINGLE_DI:
            return 2.0 * math.pi**2 * mu**2 * r**3 * math.exp(-math.pi * mu * r * r)
        lm = params.lambda_m
        coef = mu / (params.k**2 * params.lambda_s)
        return (
            coef
            * 2.0
            * math.pi
            * lm
            * r
            * (math.exp(-math.pi * lm * r * r) - math.exp(-math.pi * mu * r * r))
        )
    lm, lp = params.lambda_m, params.lambda_s
    k1sq, k2sq = params.k1**2, params.k2**2
    coef = (lm + k1sq * lp) * (lm + k2sq * lp) / ((k1sq - k2sq) * lm)
    nu1 = lm / k1sq + lp
    nu2 = lm / k2sq + lp
    return (
        2.0
        * math.pi
        * r
        * coef
        * (math.exp(-math.pi * nu1 * r * r) - math.exp(-math.pi * nu2 * r * r))
    )


def victim_distance_cdf(
    params: ScenarioParams,
    r: float,
    mode: VictimDistanceMode = VictimDistanceMode.ONE_PLUS_DI,
) -> float:
    if r <= 0.0:
        return 0.0
    if params.kind is ScenarioKind.MACRO_FEMTO:
        mu = params.k**2 * params.lambda_s + params.lambda_m
        x = math.pi * mu * r * r
        if mode is VictimDistanceMode.SINGLE_DI:
            # Gamma(2) CDF in x = pi * mu * r^2
            return 1.0 - (1.0 + x) * math.exp(-x)
        lm = params.lambda_m
        coef = mu / (params.k**2 * params.lambda_s)
        return coef * (
            -math.expm1(-math.pi * lm * r * r) + (lm / mu) * math.expm1(-x)
        )
    lm, lp = params.lambda_m, params.lambda_s
    k1sq, k2sq = params.k1**2, params.k2**2
    coef = (lm + k1sq * lp) * (lm + k2sq * lp) / ((k1sq - k2sq) * lm)
    nu1 = lm / k1sq + lp
    nu2 = lm / k2sq + lp
    return coef * (
        -math.expm1(-math.pi * nu1 * r * r) / nu1 + math.expm1(-math.pi * nu2 * r * r) / nu2
    )


def victim_distance_upper(
    params: ScenarioParams,
    mode: VictimDistanceMode = VictimDistanceMode.ONE_PLUS_DI,
    tail: float = 1e-9,
) -> float:
    """Truncation radius beyond which the victim-distance CDF tail is below `tail`."""
    if params.kind is ScenarioKind.MACRO_FEMTO:
        mu = params.k**2 * params.lambda_s + params.lambda_m
        if mode is VictimDistanceMode.SINGLE_DI:
            rate, coef = mu, 40.0
        else:
            rate = params.lambda_m
            coef = mu / (params.k**2 * params.lambda_s)
    else:
        lm, lp = params.lambda_m, params.lambda_s
        k1sq, k2sq = params.k1**2, params.k2**2
        rate = lm / k1sq + lp
        coef = (lm + k1sq * lp) * (lm + k2sq * lp) / ((k1sq - k2sq) * lm * rate)
    # exp-tail bound, padded; cheap compared to the integrals that use it
    r = math.sqrt(math.log(max(coef, 1.0) / tail + 40.0) / (math.pi * rate))
    while 1.0 - victim_distance_cdf(params, r, mode) > tail:
        r *= 1.25
    return r


def mean_di_count(params: ScenarioParams, r: float) -> float:
    """Mean number of dominant interferers of a victim at serving distance r."""
    if r < 0.0:
        raise ValueError("distance must be non-negative")
    if params.kind is ScenarioKind.MACRO_FEMTO:
        x = math.pi * params.k**2 * params.lambda_s * r * r
    else:
        x = math.pi * params.lambda_m * (1.0 / params.k2**2 - 1.0 / params.k1**2) * r * r
    if x == 0.0:
        return 1.0
    if x < 1e-8:
        # x / (1 - e^-x) = 1 + x/2 + O(x^2)
        return 1.0 + 0.5 * x
    return x / -math.expm1(-x)


def default_macro_femto() -> ScenarioParams:
    """Reference macro/femto parameter set used by the shipped configs."""
    return ScenarioParams(
        kind=ScenarioKind.MACRO_FEMTO,
        lambda_m=1e-5,
        lambda_u=20e-5,
        lambda_s=12e-5,
        p_m=dbm_to_watt(43.0),
        p_s=dbm_to_watt(20.0),
        alpha_m=2.5,
        alpha_s=3.5,
        load_m=1.0,
        load_s=0.5,
        theta0=db_to_linear(-5.0),
        rho_a=db_to_linear(-20.0),
        n_sf=10,
        n_rb=25,
        rb_bandwidth=180e3,
        c_v_min=40e3,
        k=0.136,
    )


def default_macro_pico() -> ScenarioParams:
    """Reference macro/pico parameter set used by the shipped configs."""
    return ScenarioParams(
        kind=ScenarioKind.MACRO_PICO,
        lambda_m=1e-5,
        lambda_u=20e-5,
        lambda_s=4e-5,
        p_m=dbm_to_watt(43.0),
        p_s=dbm_to_watt(30.0),
        alpha_m=2.5,
        alpha_s=3.0,
        load_m=1.0,
        load_s=0.8,
        theta0=db_to_linear(-5.0),
        rho_a=db_to_linear(-20.0),
        n_sf=10,
        n_rb=25,
        rb_bandwidth=180e3,
        c_v_min=100e3,
        k1=0.471,
        k2=0.262,
        bias=db_to_linear(7.0),
    )
