"""Analytic-versus-simulation report: row logic, corruption hook, formatting."""

from dataclasses import replace

import pytest

from absfplan.scenario import default_macro_femto, default_macro_pico
from absfplan.sim import SimConfig
from absfplan.validate import format_report, run_validation

ROW_NAMES = ("victim_fraction", "success_nsf", "success_absf", "share_nsf", "share_absf")


def small_config(params):
    return SimConfig(
        params=params,
        sim_region=2500.0,
        sample_region=1200.0,
        snapshots=4,
        absf_count=2,
        seed=1,
    )


@pytest.mark.parametrize(
    "params",
    [default_macro_femto(), default_macro_pico()],
    ids=["macro_femto", "macro_pico"],
)
def test_default_scenarios_pass_all_rows(params):
    cfg = SimConfig(
        params=params,
        sim_region=6000.0,
        sample_region=2000.0,
        snapshots=24,
        absf_count=2,
        seed=1,
    )
    report = run_validation(cfg)
    assert tuple(row.name for row in report.rows) == ROW_NAMES
    assert report.victims > 1000
    for row in report.rows:
        assert row.passed, f"{row.name}: {row.analytic} vs {row.simulated}"
        assert row.deviation == pytest.approx(row.analytic - row.simulated)
    assert report.passed


def test_corrupted_analytic_values_are_flagged():
    report = run_validation(
        small_config(default_macro_femto()),
        analytic_overrides={"success_absf": 0.9, "share_absf": 0.99},
    )
    rows = {row.name: row for row in report.rows}
    assert not rows["success_absf"].passed
    assert rows["success_absf"].deviation > 0.3
    assert not rows["share_absf"].passed
    assert rows["share_absf"].deviation > 0.02
    assert rows["victim_fraction"].passed
    assert not report.passed


def test_unit_residue_makes_subframe_kinds_identical():
    cfg = small_config(replace(default_macro_femto(), rho_a=1.0))
    report = run_validation(cfg)
    rows = {row.name: row for row in report.rows}
    assert rows["success_nsf"].analytic == pytest.approx(
        rows["success_absf"].analytic, rel=1e-12
    )
    assert rows["success_nsf"].simulated == rows["success_absf"].simulated


def test_report_formatting_carries_verdict_lines():
    report = run_validation(
        small_config(default_macro_femto()),
        analytic_overrides={"victim_fraction": 0.9},
    )
    text = format_report(report)
    lines = text.splitlines()
    assert lines[0].startswith("quantity")
    assert sum("PASS" in line or "FAIL" in line for line in lines[2:7]) == 5
    assert "FAIL" in lines[2]  # the corrupted victim-fraction row
    assert lines[-1] == "overall: FAIL"
    assert any(line.startswith("victim UEs observed:") for line in lines)
