"""Decibel and dBm conversion helpers.

All internal computations run on linear quantities (watts for transmit
powers, plain ratios for thresholds and biases).  Config files and CLI
flags carry dB/dBm values because that is how the quantities are quoted
in practice; these helpers are the only place the conversion happens.
"""

from __future__ import annotations

import math


def db_to_linear(value_db: float) -> float:
    """Power ratio from dB."""
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0.0:
        raise ValueError(f"cannot express non-positive ratio {value!r} in dB")
    return 10.0 * math.log10(value)


def dbm_to_watt(value_dbm: float) -> float:
    """Transmit power in watts from dBm."""
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def watt_to_dbm(value_w: float) -> float:
    if value_w <= 0.0:
        raise ValueError(f"cannot express non-positive power {value_w!r} in dBm")
    return 10.0 * math.log10(value_w) + 30.0
