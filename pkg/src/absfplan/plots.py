"""Headless figure rendering for the CLI report paths.

Figures are written straight to files (Agg backend); the CSV outputs
remain the canonical data and the figures are a convenience layered on
top of the same arrays.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .planner import SweepCurve
from .sim import ThroughputStudy
from .validate import ValidationReport


def save_sweep_figure(curve: SweepCurve, path: str) -> None:
    """Required ABSF count and throughputs over the sweep grid."""
    values = np.asarray(curve.values, dtype=float)
    fig, (ax_n, ax_c) = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True)
    ax_n.step(values, curve.n_absf, where="mid", color="tab:red")
    ax_n.set_ylabel("required ABSFs per frame")
    ax_n.grid(True, alpha=0.3)
    for row, label, style in (
        ([r.c_nsf for r in curve.results], "victim throughput, NSF only", "-"),
        ([r.c_absf for r in curve.results], "victim throughput, all ABSF", "--"),
    ):
        ax_c.plot(values, np.asarray(row) / 1e3, style, label=label)
    ax_c.set_xlabel(curve.parameter)
    ax_c.set_ylabel("kbit/s")
    ax_c.legend(fontsize=8)
    ax_c.grid(True, alpha=0.3)
    if values.min() > 0 and values.max() / values.min() > 50:
        ax_c.set_xscale("log")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _ecdf(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.sort(samples)
    y = np.arange(1, x.shape[0] + 1) / x.shape[0]
    return x, y


def save_cdf_figure(study: ThroughputStudy, path: str) -> None:
    """Per-class empirical CDFs of UE throughput."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for which, label in (("victim", "victim UEs"), ("nonvictim", "non-victim UEs"), ("all", "all UEs")):
        mask = study.class_mask(which)
        if not mask.any():
            continue
        x, y = _ecdf(study.throughput[mask])
        ax.plot(x / 1e3, y, label=f"{label} (n={int(mask.sum())})")
    ax.set_xlabel("throughput [kbit/s]")
    ax.set_ylabel("CDF")
    ax.set_xscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_validation_figure(report: ValidationReport, path: str) -> None:
    """Grouped bars of analytic vs simulated values per validation row."""
    names = [row.name for row in report.rows]
    analytic = [row.analytic for row in report.rows]
    simulated = [row.simulated for row in report.rows]
    x = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.bar(x - 0.2, analytic, width=0.4, label="analytic")
    ax.bar(x + 0.2, simulated, width=0.4, label="simulated")
    for i, row in enumerate(report.rows):
        ax.text(
            i,
            max(row.analytic, row.simulated) * 1.02 + 1e-3,
            "PASS" if row.passed else "FAIL",
            ha="center",
            fontsize=8,
            color="tab:green" if row.passed else "tab:red",
        )
    ax.set_xticks(x, names, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("probability / share")
    ax.legend(fontsize=8)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
