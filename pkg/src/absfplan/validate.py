"""Cross-validation of the analytic pipeline against the simulator.

Each row compares one analytic quantity with its Monte Carlo estimate:
victim fraction, success probability in both subframe kinds, and the
round-robin victim RB share in both kinds.  Tolerances follow the
quality each comparison can support: success probabilities within an
absolute 0.02, victim fraction within three binomial standard errors,
and shares on the absolute share scale.  The macro/femto NSF share is
the one case where the analytic value tracks the measurement closely
(within 0.05); the remaining share values are derived under an
approximation that undercounts contender clustering, so they are
checked as lower bounds that may not exceed the measurement by more
than 0.02.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import rrfrac, scenario, sim
from .scenario import ScenarioKind, SubframeKind
from .specfun import DEFAULT_QUADRATURE, QuadratureSpec


@dataclass(frozen=True)
class ValidationRow:
    name: str
    analytic: float
    simulated: float
    deviation: float  # analytic - simulated
    tolerance_note: str
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[ValidationRow, ...]
    victims: int

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)


def _omega_values(params, spec: QuadratureSpec) -> tuple[float, float]:
    if params.kind is ScenarioKind.MACRO_FEMTO:
        return (
            rrfrac.omega_mf_closed(params, SubframeKind.NSF),
            rrfrac.omega_mf_closed(params, SubframeKind.ABSF),
        )
    return (
        rrfrac.omega_bar(
            rrfrac.conditioned_area_pdf(params, SubframeKind.NSF), params.lambda_u, spec
        ),
        rrfrac.omega_bar(
            rrfrac.conditioned_area_pdf(params, SubframeKind.ABSF), params.lambda_u, spec
        ),
    )


def run_validation(
    config: sim.SimConfig,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    analytic_overrides: dict[str, float] | None = None,
) -> ValidationReport:
    """Build the comparison table.

    analytic_overrides replaces named analytic values before comparison
    (keys: victim_fraction, success_nsf, success_absf, share_nsf,
    share_absf).  It exists so the harness can verify that a corrupted
    analytic path is actually flagged.
    """
    from . import success as success_mod  # deferred to keep import cheap

    params = config.params
    overrides = analytic_overrides or {}

    def analytic(name: str, value: float) -> float:
        return overrides.get(name, value)

    rows: list[ValidationRow] = []

    # victim fraction against the snapshot classifier
    counts_victim = 0
    counts_total = 0
    for index in range(config.snapshots):
        snapshot = sim.generate_snapshot(config, index)
        mask = snapshot.in_sample
        counts_total += int(mask.sum())
        counts_victim += int((snapshot.is_victim & mask).sum())
    if counts_total == 0:
        raise sim.InsufficientSamplesError("no UEs fell in the sample region", victims=0)
    fraction = counts_victim / counts_total
    se = math.sqrt(max(fraction * (1.0 - fraction), 1e-12) / counts_total)
    value = analytic("victim_fraction", scenario.victim_probability(params))
    deviation = value - fraction
    rows.append(
        ValidationRow(
            name="victim_fraction",
            analytic=value,
            simulated=fraction,
            deviation=deviation,
            tolerance_note=f"|dev| <= 3 SE = {3 * se:.3g}",
            passed=abs(deviation) <= 3 * se,
        )
    )

    # success probabilities, both kinds
    victims = 0
    for kind, name in ((SubframeKind.NSF, "success_nsf"), (SubframeKind.ABSF, "success_absf")):
        estimate = sim.estimate_success_probability(config, kind)
        victims = estimate.victims
        value = analytic(name, success_mod.success_probability(params, kind, spec=spec))
        deviation = value - estimate.probability
        rows.append(
            ValidationRow(
                name=name,
                analytic=value,
                simulated=estimate.probability,
                deviation=deviation,
                tolerance_note="|dev| <= 0.02",
                passed=abs(deviation) <= 0.02,
            )
        )

    # round-robin victim shares, both kinds
    share_config = replace(config, absf_count=max(config.absf_count, 1))
    measured = sim.measure_rr_shares(share_config)
    omega_nsf, omega_absf = _omega_values(params, spec)
    value = analytic("share_nsf", omega_nsf)
    deviation = value - measured.nsf
    if params.kind is ScenarioKind.MACRO_FEMTO:
        nsf_note = "|dev| <= 0.05"
        nsf_passed = abs(deviation) <= 0.05
    else:
        nsf_note = "lower bound: dev <= 0.02"
        nsf_passed = deviation <= 0.02
    rows.append(
        ValidationRow(
            name="share_nsf",
            analytic=value,
            simulated=measured.nsf,
            deviation=deviation,
            tolerance_note=nsf_note,
            passed=nsf_passed,
        )
    )
    value = analytic("share_absf", omega_absf)
    deviation = value - measured.absf
    rows.append(
        ValidationRow(
            name="share_absf",
            analytic=value,
            simulated=measured.absf,
            deviation=deviation,
            tolerance_note="lower bound: dev <= 0.02",
            passed=deviation <= 0.02,
        )
    )
    return ValidationReport(rows=tuple(rows), victims=victims)


def format_report(report: ValidationReport) -> str:
    header = f"{'quantity':<16}{'analytic':>12}{'simulated':>12}{'deviation':>12}  {'criterion':<28}{'result':<6}"
    lines = [header, "-" * len(header)]
    for row in report.rows:
        lines.append(
            f"{row.name:<16}{row.analytic:>12.5f}{row.simulated:>12.5f}"
            f"{row.deviation:>+12.5f}  {row.tolerance_note:<28}"
            f"{'PASS' if row.passed else 'FAIL':<6}"
        )
    lines.append(f"victim UEs observed: {report.victims}")
    lines.append("overall: " + ("PASS" if report.passed else "FAIL"))
    return "\n".join(lines)
