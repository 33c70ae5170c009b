"""Special functions and quadrature primitives for the interference model.

Provides:
    rho(gamma, alpha)      -- normalized interference attenuation integral
    gauss_2f1(a, b, c, z)  -- Gauss hypergeometric function for z <= 0
    integrate(f, lo, hi)   -- adaptive quadrature with infinite-tail support

rho is the classic Rayleigh-fading Laplace exponent factor

    rho(gamma, alpha) = gamma^(2/alpha) * int_{gamma^(-2/alpha)}^inf du / (1 + u^(alpha/2))

which appears in every tier's interference term.  It is evaluated by
adaptive quadrature with the substitution u = L + t/(1-t) for the
infinite tail; alpha = 4 takes the arctan closed form.

gauss_2f1 is restricted to real parameters and z <= 0, which is all the
success-probability expressions need.  The Gauss series is used directly
for small |z|, the Pfaff transformation z -> z/(z-1) for moderate |z|,
and the 1/(1-z) connection formula for large |z| where the Pfaff series
would need tens of thousands of terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy.integrate import quad
from scipy.special import rgamma


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


class HypergeometricError(RuntimeError):
    """Series for 2F1 did not converge within the term budget."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances shared by every quadrature in the analytic pipeline."""

    absolute_tolerance: float = 1e-10
    relative_tolerance: float = 1e-8
    max_subdivisions: int = 2000


DEFAULT_QUADRATURE = QuadratureSpec()

# Series evaluation limits for gauss_2f1.  The Pfaff-transformed argument
# w = z/(z-1) stays below 0.8 for |z| <= 4, which keeps the series short;
# beyond that the connection formula in 1/(1-z) converges in a few terms.
_SERIES_Z_MAX = 0.5
_PFAFF_Z_MAX = 4.0
_MAX_TERMS = 20000
_TERM_TOL = 1e-15


def integrate(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    spec: QuadratureSpec | None = None,
) -> float:
    """Integrate f over [lower, upper]; upper may be math.inf."""
    spec = spec or DEFAULT_QUADRATURE
    if math.isinf(upper):
        base = lower
        inner = f

        def transformed(t: float) -> float:
            if t >= 1.0:
                return 0.0
            onemt = 1.0 - t
            return inner(base + t / onemt) / (onemt * onemt)

        f, lower, upper = transformed, 0.0, 1.0
    out = quad(
        f,
        lower,
        upper,
        epsabs=spec.absolute_tolerance,
        epsrel=spec.relative_tolerance,
        limit=spec.max_subdivisions,
        full_output=1,
    )
    value, abserr = out[0], out[1]
    if len(out) > 3:
        raise QuadratureError(f"quadrature failed: {out[3]}", estimate=value)
    bound = max(spec.absolute_tolerance, spec.relative_tolerance * abs(value))
    if abserr > 100.0 * bound:
        raise QuadratureError(
            f"quadrature error estimate {abserr:.3e} above tolerance", estimate=value
        )
    return value


def rho(gamma: float, alpha: float, spec: QuadratureSpec | None = None) -> float:
    """Interference attenuation factor rho(gamma, alpha) for path loss exponent alpha > 2."""
    if alpha <= 2.0:
        raise ValueError(f"path loss exponent must exceed 2, got {alpha!r}")
    if gamma < 0.0:
        raise ValueError(f"threshold must be non-negative, got {gamma!r}")
    if gamma == 0.0:
        return 0.0
    if alpha == 4.0:
        s = math.sqrt(gamma)
        return s * (math.pi / 2.0 - math.atan(1.0 / s))
    # Inverting the variable (t = 1/u) turns the slowly decaying tail into
    # a finite interval whose single algebraic endpoint singularity the
    # adaptive rule extrapolates accurately even as alpha approaches 2.
    power = 2.0 / alpha
    upper = gamma**power
    half = alpha / 2.0
    value = integrate(lambda t: t ** (half - 2.0) / (1.0 + t**half), 0.0, upper, spec)
    return upper * value


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0.0 and abs(x - round(x)) < 1e-12


def _gauss_series(a: float, b: float, c: float, z: float) -> float:
    """Plain Gauss series; caller guarantees convergence or termination."""
    term = 1.0
    total = 1.0
    for n in range(_MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        if term == 0.0 or abs(term) <= _TERM_TOL * abs(total):
            return total
    raise HypergeometricError(
        f"2F1 series did not converge for z={z!r}", residual=abs(term)
    )


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric 2F1(a, b; c; z) for real parameters and z <= 0."""
    if z > 0.0:
        raise ValueError(f"gauss_2f1 is restricted to z <= 0, got {z!r}")
    if _is_nonpositive_int(c):
        raise ValueError(f"2F1 undefined for non-positive integer c={c!r}")
    if z == 0.0:
        return 1.0
    # Terminating polynomial case, valid for any z.
    if _is_nonpositive_int(a) or _is_nonpositive_int(b):
        return _gauss_series(a, b, c, z)
    az = abs(z)
    if az <= _SERIES_Z_MAX:
        return _gauss_series(a, b, c, z)
    if az <= _PFAFF_Z_MAX or abs((b - a) - round(b - a)) < 1e-8:
        # Pfaff maps z <= 0 onto [0, 1); also the fallback when the
        # connection formula below would hit its integer-difference pole.
        w = z / (z - 1.0)
        return (1.0 - z) ** (-a) * _gauss_series(a, c - b, c, w)
    # DLMF 15.8.2 connection formula in 1/(1-z); requires b - a non-integer.
    x = 1.0 / (1.0 - z)
    coef_a = math.gamma(c) * math.gamma(b - a) * rgamma(b) * rgamma(c - a)
    coef_b = math.gamma(c) * math.gamma(a - b) * rgamma(a) * rgamma(c - b)
    out = 0.0
    if coef_a != 0.0:
        out += coef_a * x**a * _gauss_series(a, c - b, a - b + 1.0, x)
    if coef_b != 0.0:
        out += coef_b * x**b * _gauss_series(b, c - a, b - a + 1.0, x)
    return out
