"""Figure rendering for analysis, suite, and power reports.

All figures are written to files (Agg backend, no display). The analyze
figure shows the fused mean-magnitude signal with thresholds and detected
segments; the suite figure shows per-scenario event timelines against
their truth windows; the power figure draws the autonomy-vs-activity
curve.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .pipeline import AnalysisResult
from .power import PowerProfile, autonomy_years
from .suite import _GROUPS, GROUP_NAMES, ConfusionReport

MAX_PLOT_POINTS = 20_000

_EVENT_COLORS = {
    "collision": "tab:red",
    "harsh_braking": "tab:orange",
    "vibration": "tab:blue",
}


def _decimated(t: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if t.size <= MAX_PLOT_POINTS:
        return t, y
    step = int(np.ceil(t.size / MAX_PLOT_POINTS))
    return t[::step], y[::step]


def plot_analysis(result: AnalysisResult, path: str | Path) -> Path:
    """Fused signal overview with thresholds, segments, and event labels."""
    path = Path(path)
    fused = result.fused
    cfg = result.config
    t, y = _decimated(fused.t, fused.a_total_mean)

    fig, ax = plt.subplots(figsize=(11, 4))
    ax.plot(t, y, lw=0.7, color="0.3", label="mean |a| (both nodes)")
    ax.axhline(cfg.trigger_threshold, color="tab:red", lw=0.8, ls="--", label="trigger")
    ax.axhline(cfg.release_threshold, color="tab:green", lw=0.8, ls=":", label="release")
    for seg in result.segments:
        ax.axvspan(seg.t_start, seg.t_end, color="tab:orange", alpha=0.25)
    for ev in result.events:
        ax.annotate(
            ev.human_description,
            xy=(ev.t_start, ev.peak),
            xytext=(0, 6),
            textcoords="offset points",
            fontsize=8,
            rotation=30,
        )
    ax.set_xlabel("time [s]")
    ax.set_ylabel("acceleration [m/s²]")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_suite(report: ConfusionReport, path: str | Path) -> Path:
    """Per-scenario event timelines plus a confusion summary bar chart."""
    path = Path(path)
    n = len(report.scenarios)
    fig, (ax_tl, ax_bar) = plt.subplots(
        2, 1, figsize=(11, 1.0 * n + 4), height_ratios=[n, 3]
    )

    for row, outcome in enumerate(report.scenarios):
        for entry in outcome.truth:
            spec = entry.spec
            ax_tl.barh(
                row,
                width=max(spec.duration, 0.2),
                left=spec.t_onset,
                height=0.8,
                color="0.85",
                edgecolor="0.6",
                zorder=1,
            )
        for ev in outcome.events:
            group = _GROUPS[ev.kind]
            ax_tl.barh(
                row,
                width=max(ev.t_end - ev.t_start, 0.15),
                left=ev.t_start,
                height=0.45,
                color=_EVENT_COLORS[group],
                zorder=2,
            )
    ax_tl.set_yticks(range(n))
    ax_tl.set_yticklabels([s.name for s in report.scenarios], fontsize=8)
    ax_tl.invert_yaxis()
    ax_tl.set_xlabel("time [s]  (grey = injected ground truth, colored = detections)")
    ax_tl.set_xlim(0, max(s.duration for s in report.scenarios) * 1.02)

    x = np.arange(len(GROUP_NAMES))
    for k, stat in enumerate(("tp", "fp", "fn")):
        vals = [getattr(report.metrics[name], stat) for name in GROUP_NAMES]
        ax_bar.bar(x + 0.25 * k, vals, width=0.25, label=stat)
    ax_bar.set_xticks(x + 0.25)
    ax_bar.set_xticklabels(GROUP_NAMES)
    ax_bar.legend(fontsize=8)
    ax_bar.set_title(
        f"zones {report.zone_correct}/{report.zone_total} correct — "
        f"{'PASS' if report.passed else 'FAIL'}",
        fontsize=10,
    )
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_autonomy(
    profile: PowerProfile,
    path: str | Path,
    *,
    rates: np.ndarray | None = None,
) -> Path:
    """Autonomy (years) versus trigger rate at the profile's active time."""
    path = Path(path)
    if rates is None:
        rates = np.logspace(0, 4.3, 120)
    years = [
        autonomy_years(replace(profile, triggers_per_day=float(r)))
        for r in rates
    ]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogx(rates, years, color="tab:blue")
    if profile.triggers_per_day > 0:
        ax.axvline(profile.triggers_per_day, color="tab:red", lw=0.8, ls="--")
    ax.set_xlabel("triggers per day")
    ax.set_ylabel("battery autonomy [years]")
    ax.set_title(
        f"active {profile.active_s_per_trigger * 1e3:.0f} ms/trigger, "
        f"{profile.battery_wh:g} Wh battery",
        fontsize=10,
    )
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
