"""Flat key=value configuration files with units spelled in the key names.

The format is deliberately strict: every key carries its unit suffix
(p_m_dbm, theta0_db, lambda_m_per_m2), unknown keys are errors, and all
values are plain scalars.  Silent unit mistakes are the dominant failure
mode in this domain, so nothing is inferred.

The distance-ratio coefficients k (macro/femto) and k1/k2 (macro/pico)
accept either a number or the word "formula", which derives them from
the power ratio and path loss exponents (k1 additionally folds in the
association bias).  Shipped configs pin the literal calibrated values;
the formula variant is available for sensitivity studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scenario import ScenarioKind, ScenarioParams, di_coefficient
from .sim import Scheduler, SimConfig
from .units import db_to_linear, dbm_to_watt


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


_SCENARIO_NAMES = {
    "macro_femto": ScenarioKind.MACRO_FEMTO,
    "macro_pico": ScenarioKind.MACRO_PICO,
}

_BOOL_NAMES = {
    "true": True,
    "yes": True,
    "on": True,
    "1": True,
    "false": False,
    "no": False,
    "off": False,
    "0": False,
}

# key -> (kind, required, default); kind drives conversion
_KEYS: dict[str, tuple[str, bool, object]] = {
    "scenario": ("scenario", True, None),
    "lambda_m_per_m2": ("float", True, None),
    "lambda_u_per_m2": ("float", True, None),
    "lambda_s_per_m2": ("float", True, None),
    "p_m_dbm": ("float", True, None),
    "p_s_dbm": ("float", True, None),
    "alpha_m": ("float", True, None),
    "alpha_s": ("float", True, None),
    "load_m": ("float", True, None),
    "load_s": ("float", True, None),
    "theta0_db": ("float", True, None),
    "rho_a_db": ("float", True, None),
    "k": ("coefficient", False, None),
    "k1": ("coefficient", False, None),
    "k2": ("coefficient", False, None),
    "bias_db": ("float", False, 0.0),
    "n_sf": ("int", False, 10),
    "n_rb": ("int", False, 25),
    "rb_bandwidth_hz": ("float", False, 180e3),
    "c_v_min_bps": ("float", False, 0.0),
    "sim_region_m": ("float", False, 6000.0),
    "sample_region_m": ("float", False, 2000.0),
    "snapshots": ("int", False, 200),
    "frames": ("int", False, 20),
    "scheduler": ("scheduler", False, "rr"),
    "absf_count": ("int", False, 0),
    "seed": ("int", False, 0),
    "near_per_tier": ("int", False, 16),
    "far_field_compensation": ("bool", False, False),
    "pf_warmup_draws": ("int", False, 200),
}

_SIM_KEYS = (
    "sim_region_m",
    "sample_region_m",
    "snapshots",
    "frames",
    "scheduler",
    "absf_count",
    "seed",
    "near_per_tier",
    "far_field_compensation",
    "pf_warmup_draws",
)


def parse_config_text(text: str) -> dict[str, object]:
    """Parse key = value lines into typed values with defaults applied."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _KEYS:
            known = ", ".join(sorted(_KEYS))
            raise ConfigError(f"line {lineno}: unknown key {key!r} (known keys: {known})")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    values: dict[str, object] = {}
    for key, (kind, required, default) in _KEYS.items():
        if key not in raw:
            if required:
                raise ConfigError(f"{key}: required key is missing")
            values[key] = default
            continue
        values[key] = _convert(key, kind, raw[key])
    return values


def _convert(key: str, kind: str, value: str) -> object:
    if kind == "scenario":
        if value not in _SCENARIO_NAMES:
            raise ConfigError(f"{key}: expected one of {sorted(_SCENARIO_NAMES)}, got {value!r}")
        return _SCENARIO_NAMES[value]
    if kind == "scheduler":
        if value not in ("rr", "pf"):
            raise ConfigError(f"{key}: expected 'rr' or 'pf', got {value!r}")
        return value
    if kind == "bool":
        if value.lower() not in _BOOL_NAMES:
            raise ConfigError(f"{key}: expected a boolean, got {value!r}")
        return _BOOL_NAMES[value.lower()]
    if kind == "int":
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"{key}: expected an integer, got {value!r}") from exc
    if kind == "coefficient":
        if value == "formula":
            return "formula"
        kind = "float"
    try:
        parsed = float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from exc
    if not math.isfinite(parsed):
        raise ConfigError(f"{key}: value must be finite, got {value!r}")
    return parsed


def _resolve_coefficient(
    name: str, value: object, p_num: float, p_den: float, alpha_a: float, alpha_b: float, bias: float
) -> float:
    if value == "formula":
        return di_coefficient(p_num, p_den, alpha_a, alpha_b, bias)
    if value is None:
        raise ConfigError(f"{name}: required for this scenario (number or 'formula')")
    return float(value)


def scenario_from_config(values: dict[str, object]) -> ScenarioParams:
    """Build ScenarioParams from parsed config values (dB/dBm converted here)."""
    kind = values["scenario"]
    p_m = dbm_to_watt(float(values["p_m_dbm"]))
    p_s = dbm_to_watt(float(values["p_s_dbm"]))
    alpha_m = float(values["alpha_m"])
    alpha_s = float(values["alpha_s"])
    bias = db_to_linear(float(values["bias_db"]))
    fields = dict(
        kind=kind,
        lambda_m=float(values["lambda_m_per_m2"]),
        lambda_u=float(values["lambda_u_per_m2"]),
        lambda_s=float(values["lambda_s_per_m2"]),
        p_m=p_m,
        p_s=p_s,
        alpha_m=alpha_m,
        alpha_s=alpha_s,
        load_m=float(values["load_m"]),
        load_s=float(values["load_s"]),
        theta0=db_to_linear(float(values["theta0_db"])),
        rho_a=db_to_linear(float(values["rho_a_db"])),
        n_sf=int(values["n_sf"]),
        n_rb=int(values["n_rb"]),
        rb_bandwidth=float(values["rb_bandwidth_hz"]),
        c_v_min=float(values["c_v_min_bps"]),
        bias=bias,
    )
    if kind is ScenarioKind.MACRO_FEMTO:
        fields["k"] = _resolve_coefficient("k", values["k"], p_s, p_m, alpha_m, alpha_s, 1.0)
        if values["k1"] is not None or values["k2"] is not None:
            raise ConfigError("k1/k2: only valid for scenario = macro_pico")
    else:
        fields["k1"] = _resolve_coefficient(
            "k1", values["k1"], p_s, p_m, alpha_m, alpha_s, bias
        )
        fields["k2"] = _resolve_coefficient("k2", values["k2"], p_s, p_m, alpha_m, alpha_s, 1.0)
        if values["k"] is not None:
            raise ConfigError("k: only valid for scenario = macro_femto")
    try:
        return ScenarioParams(**fields)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def sim_from_config(
    values: dict[str, object], params: ScenarioParams, **overrides: object
) -> SimConfig:
    """Build SimConfig; keyword overrides (CLI flags) beat file values."""
    fields: dict[str, object] = {
        "params": params,
        "sim_region": float(values["sim_region_m"]),
        "sample_region": float(values["sample_region_m"]),
        "snapshots": int(values["snapshots"]),
        "frames": int(values["frames"]),
        "scheduler": Scheduler(values["scheduler"]),
        "absf_count": int(values["absf_count"]),
        "seed": int(values["seed"]),
        "near_per_tier": int(values["near_per_tier"]),
        "far_field_compensation": bool(values["far_field_compensation"]),
        "pf_warmup_draws": int(values["pf_warmup_draws"]),
    }
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "scheduler" and isinstance(value, str):
            value = Scheduler(value)
        fields[key] = value
    try:
        return SimConfig(**fields)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> dict[str, object]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config_text(text)


@dataclass(frozen=True)
class ResolvedConfig:
    """Typed view of one parsed file: scenario plus simulation setup."""

    values: dict[str, object]
    params: ScenarioParams
    sim: SimConfig


def resolve(path: str, **sim_overrides: object) -> ResolvedConfig:
    values = load_config(path)
    params = scenario_from_config(values)
    sim = sim_from_config(values, params, **sim_overrides)
    return ResolvedConfig(values=values, params=params, sim=sim)


def resolved_text(resolved: ResolvedConfig) -> str:
    """Render the fully resolved configuration as config-file text.

    The output is itself a valid config file, so a manifest can be
    replayed by pasting this block into a file and re-running the
    command with the recorded flags.
    """
    values = dict(resolved.values)
    params = resolved.params
    if params.kind is ScenarioKind.MACRO_FEMTO:
        values["k"] = params.k
    else:
        values["k1"] = params.k1
        values["k2"] = params.k2
    sim = resolved.sim
    values.update(
        sim_region_m=sim.sim_region,
        sample_region_m=sim.sample_region,
        snapshots=sim.snapshots,
        frames=sim.frames,
        scheduler=sim.scheduler.value,
        absf_count=sim.absf_count,
        seed=sim.seed,
        near_per_tier=sim.near_per_tier,
        far_field_compensation=sim.far_field_compensation,
        pf_warmup_draws=sim.pf_warmup_draws,
    )
    lines = []
    for key in _KEYS:
        value = values[key]
        if value is None:
            continue
        if key == "scenario":
            value = next(n for n, v in _SCENARIO_NAMES.items() if v is value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
