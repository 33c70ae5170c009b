"""Dimensioning logic: throughput composition, ABSF counts, sweeps.

The component factors (success probabilities and round-robin shares)
carry their own oracle checks in test_success and test_rrfrac, so the
focus here is the composition, the integer search with its edge cases,
and the sweep-parameter rescaling rules.
"""

import math
from dataclasses import replace

import pytest

from absfplan.planner import (
    SWEEP_PARAMETERS,
    apply_sweep_value,
    mixed_outage_throughput,
    outage_throughput,
    required_absf,
    spectral_efficiency,
    sweep,
    victim_share,
)
from absfplan.rrfrac import conditioned_area_pdf, omega_bar, omega_mf_closed
from absfplan.scenario import SubframeKind, default_macro_femto, default_macro_pico
from absfplan.success import success_probability


def peak_rate(params):
    return params.n_rb * params.rb_bandwidth * math.log2(1.0 + params.theta0)


def test_spectral_efficiency_value():
    p = default_macro_femto()
    assert spectral_efficiency(p) == pytest.approx(math.log2(1.0 + 10.0**-0.5), rel=1e-15)
    assert peak_rate(p) == pytest.approx(1783841.2252340124, rel=1e-12)


def test_victim_share_routes():
    mf = default_macro_femto()
    mp = default_macro_pico()
    for kind in (SubframeKind.NSF, SubframeKind.ABSF):
        closed = victim_share(mf, kind)
        assert closed == omega_mf_closed(mf, kind)
        numeric = omega_bar(conditioned_area_pdf(mf, kind), mf.lambda_u)
        assert abs(closed - numeric) < 1e-9 * closed
        assert victim_share(mp, kind) == pytest.approx(
            omega_bar(conditioned_area_pdf(mp, kind), mp.lambda_u), rel=1e-12
        )


def test_outage_throughput_composition():
    p = default_macro_pico()
    for kind in (SubframeKind.NSF, SubframeKind.ABSF):
        expected = (
            peak_rate(p)
            * success_probability(p, kind)
            * victim_share(p, kind)
        )
        assert outage_throughput(p, kind) == pytest.approx(expected, rel=1e-12)
    assert outage_throughput(p, SubframeKind.NSF, success=1.0, share=1.0) == pytest.approx(
        peak_rate(p), rel=1e-12
    )
    assert outage_throughput(p, SubframeKind.NSF, success=0.5, share=0.1) == pytest.approx(
        0.05 * peak_rate(p), rel=1e-12
    )


def test_mixed_throughput_interpolates_linearly():
    p = default_macro_femto()
    c_nsf = outage_throughput(p, SubframeKind.NSF)
    c_absf = outage_throughput(p, SubframeKind.ABSF)
    for n in range(p.n_sf + 1):
        expected = (n * c_absf + (p.n_sf - n) * c_nsf) / p.n_sf
        assert mixed_outage_throughput(p, n) == pytest.approx(expected, rel=1e-12)
    for bad in (-1, p.n_sf + 1):
        with pytest.raises(ValueError):
            mixed_outage_throughput(p, bad)


def test_required_absf_reference_plans():
    mf = required_absf(default_macro_femto())
    assert (mf.n_absf, mf.feasible) == (3, True)
    assert mf.c_nsf == pytest.approx(17944.904328857127, rel=1e-9)
    assert mf.c_absf == pytest.approx(99005.52589461836, rel=1e-9)
    assert mf.c_mixed == pytest.approx(42263.090798585494, rel=1e-9)

    mp = required_absf(default_macro_pico())
    assert (mp.n_absf, mp.feasible) == (2, True)
    assert mp.c_nsf == pytest.approx(5236.996978318634, rel=1e-9)
    assert mp.c_absf == pytest.approx(550074.3031856638, rel=1e-9)
    assert mp.c_mixed == pytest.approx(114204.45821978766, rel=1e-9)


def test_plan_fields_consistent():
    p = default_macro_pico()
    r = required_absf(p)
    assert r.params is p
    assert r.success_nsf == success_probability(p, SubframeKind.NSF)
    assert r.success_absf == success_probability(p, SubframeKind.ABSF)
    assert r.share_nsf == pytest.approx(victim_share(p, SubframeKind.NSF), rel=1e-12)
    assert r.share_absf == pytest.approx(victim_share(p, SubframeKind.ABSF), rel=1e-12)
    assert r.c_nsf == pytest.approx(peak_rate(p) * r.success_nsf * r.share_nsf, rel=1e-12)
    assert r.c_absf == pytest.approx(peak_rate(p) * r.success_absf * r.share_absf, rel=1e-12)
    mix = (r.n_absf * r.c_absf + (p.n_sf - r.n_absf) * r.c_nsf) / p.n_sf
    assert r.c_mixed == pytest.approx(mix, rel=1e-12)
    assert r.c_mixed >= p.c_v_min
    if r.n_absf > 0:
        undershoot = (r.n_absf - 1) * r.c_absf + (p.n_sf - r.n_absf + 1) * r.c_nsf
        assert undershoot / p.n_sf < p.c_v_min


def test_zero_absf_when_target_already_met():
    p = replace(default_macro_femto(), c_v_min=10e3)
    r = required_absf(p)
    assert (r.n_absf, r.feasible) == (0, True)
    assert r.c_mixed == r.c_nsf
    r0 = required_absf(replace(p, c_v_min=0.0))
    assert (r0.n_absf, r0.feasible) == (0, True)


def test_no_small_cells_short_circuits_to_zero_absf():
    # With lambda_s = 0 there are no victims, so blanking is pointless
    # and the per-victim means are undefined.
    for builder in (default_macro_femto, default_macro_pico):
        r = required_absf(replace(builder(), lambda_s=0.0))
        assert (r.n_absf, r.feasible) == (0, True)
        for field in ("c_nsf", "c_absf", "c_mixed", "success_nsf", "success_absf"):
            assert math.isnan(getattr(r, field))
        assert math.isnan(r.share_nsf) and math.isnan(r.share_absf)
    curve = sweep(default_macro_femto(), "lambda_s", [0.0, 1.2e-4])
    assert curve.n_absf[0] == 0
    assert curve.n_absf[1] > 0


def test_saturation_when_target_unreachable():
    p = replace(default_macro_pico(), c_v_min=1e9)
    r = required_absf(p)
    assert r.n_absf == p.n_sf
    assert not r.feasible
    assert r.c_mixed == pytest.approx(r.c_absf, rel=1e-12)


def test_exact_integer_ratio_snaps():
    base = required_absf(default_macro_femto())
    target = base.c_nsf + 2.0 * (base.c_absf - base.c_nsf) / base.params.n_sf
    r = required_absf(replace(base.params, c_v_min=target))
    assert (r.n_absf, r.feasible) == (2, True)


def test_sweep_value_simple_fields():
    p = default_macro_femto()
    assert apply_sweep_value(p, "lambda_s", 5e-5).lambda_s == 5e-5
    assert apply_sweep_value(p, "lambda_u", 3e-4).lambda_u == 3e-4
    assert apply_sweep_value(p, "rho_a", 0.1).rho_a == 0.1
    assert apply_sweep_value(p, "c_v_min", 75e3).c_v_min == 75e3
    assert apply_sweep_value(p, "lambda_s", 5e-5).lambda_m == p.lambda_m


def test_sweep_value_margin_rescales_di_coefficient():
    mf = default_macro_femto()
    swept = apply_sweep_value(mf, "margin", 2.0)
    assert swept.k == pytest.approx(mf.k * 2.0 ** (-2.0 / 6.0), rel=1e-12)
    assert apply_sweep_value(mf, "margin", 1.0).k == mf.k

    mp = default_macro_pico()
    swept = apply_sweep_value(mp, "margin", 2.0)
    assert swept.k2 == pytest.approx(mp.k2 * 2.0 ** (-2.0 / 5.5), rel=1e-12)
    assert swept.k1 == mp.k1
    with pytest.raises(ValueError):
        apply_sweep_value(mp, "margin", 0.1)
    with pytest.raises(ValueError):
        apply_sweep_value(mp, "margin", 0.0)


def test_sweep_value_bias_rescales_outer_coefficient():
    mp = default_macro_pico()
    swept = apply_sweep_value(mp, "bias", 2.0 * mp.bias)
    assert swept.k1 == pytest.approx(mp.k1 * 2.0 ** (2.0 / 5.5), rel=1e-12)
    assert swept.bias == 2.0 * mp.bias
    anchored = apply_sweep_value(mp, "bias", mp.bias)
    assert (anchored.k1, anchored.bias) == (mp.k1, mp.bias)
    with pytest.raises(ValueError):
        apply_sweep_value(mp, "bias", 0.9)
    with pytest.raises(ValueError):
        apply_sweep_value(mp, "bias", -1.0)
    with pytest.raises(ValueError):
        apply_sweep_value(default_macro_femto(), "bias", 2.0)


def test_sweep_value_rejects_unknown_parameter():
    with pytest.raises(ValueError, match="unknown sweep parameter"):
        apply_sweep_value(default_macro_femto(), "lambda_q", 1.0)
    assert set(SWEEP_PARAMETERS) == {
        "lambda_s",
        "lambda_u",
        "rho_a",
        "margin",
        "bias",
        "c_v_min",
    }


def test_sweep_target_staircase():
    curve = sweep(default_macro_pico(), "c_v_min", (50e3, 100e3, 200e3, 400e3))
    assert curve.n_absf == (1, 2, 4, 8)
    assert all(r.feasible for r in curve.results)
    rows = list(curve.rows())
    assert [row[0] for row in rows] == [50e3, 100e3, 200e3, 400e3]
    for (value, n, c_nsf, c_absf), result in zip(rows, curve.results):
        assert n == result.n_absf
        assert (c_nsf, c_absf) == (result.c_nsf, result.c_absf)


def test_sweep_residue_grid():
    curve = sweep(default_macro_femto(), "rho_a", (1e-3, 1e-2, 1e-1))
    assert curve.n_absf == (3, 3, 3)
    c_absf = [r.c_absf for r in curve.results]
    assert all(a > b for a, b in zip(c_absf, c_absf[1:]))
    with pytest.raises(ValueError):
        sweep(default_macro_femto(), "rho_a", ())
