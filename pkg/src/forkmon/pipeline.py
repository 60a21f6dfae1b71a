"""End-to-end analysis: calibrate, level, fuse, segment, classify.

This is the composition root used by both the CLI and the scenario suite;
each stage lives in its own module and stays independently testable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

from .calibration import (
    CalibrationParams,
    calibrate_trace,
    compensate_gravity,
    estimate_yaw_moving,
    find_moving_window,
    level_trace,
)
from .classify import classify_segment
from .config import AnalysisConfig
from .errors import InputError, InsufficientMotion
from .logio import parse_log
from .model import (
    EventReport,
    FusedTrace,
    MountPosition,
    Segment,
    SensorTrace,
    resample_align,
)
from .segmentation import extract_segments

_DEFAULT_CFG = AnalysisConfig()


@dataclass(frozen=True)
class AnalysisResult:
    """Everything one pipeline run produced, for reporting and inspection."""

    config: AnalysisConfig
    front_calibration: CalibrationParams
    back_calibration: CalibrationParams
    fused: FusedTrace
    segments: tuple[Segment, ...]
    events: tuple[EventReport, ...]

    def calibration(self, position: MountPosition) -> CalibrationParams:
        if position is MountPosition.FRONT:
            return self.front_calibration
        return self.back_calibration


def _prepare(trace: SensorTrace, cfg: AnalysisConfig) -> tuple[SensorTrace, CalibrationParams]:
    """Calibrate one raw trace and return it leveled + gravity-compensated."""
    params = calibrate_trace(trace, gravity=cfg.gravity)
    leveled = level_trace(trace, params)
    compensated = compensate_gravity(leveled, gravity=cfg.gravity)
    window = find_moving_window(compensated)
    if window is not None:
        try:
            params = estimate_yaw_moving(compensated.a[window[0] : window[1]], params)
        except InsufficientMotion:
            pass  # advisory estimate only; keep roll/pitch
    return compensated, params


def analyze_traces(
    front: SensorTrace,
    back: SensorTrace,
    cfg: AnalysisConfig = _DEFAULT_CFG,
) -> AnalysisResult:
    """Run the full detection pipeline on a raw tilted front/back pair."""
    front = front.with_position(MountPosition.FRONT)
    back = back.with_position(MountPosition.BACK)
    front_c, front_params = _prepare(front, cfg)
    back_c, back_params = _prepare(back, cfg)
    fused = resample_align(front_c, back_c)
    segments = extract_segments(fused, cfg)
    events = [ev for seg in segments if (ev := classify_segment(seg, fused, cfg)) is not None]
    events.sort(key=lambda ev: ev.t_start)
    return AnalysisResult(
        config=cfg,
        front_calibration=front_params,
        back_calibration=back_params,
        fused=fused,
        segments=tuple(segments),
        events=tuple(events),
    )


def analyze_log(
    source: str | Path | TextIO,
    cfg: AnalysisConfig = _DEFAULT_CFG,
) -> AnalysisResult:
    """Parse a dual-node log and analyze it.

    Node ids are mapped to mount positions through cfg.front_node_id and
    cfg.back_node_id; the log must contain exactly those two nodes.
    """
    traces = {tr.node_id: tr for tr in parse_log(source, sample_rate_hz=cfg.sample_rate)}
    wanted = (cfg.front_node_id, cfg.back_node_id)
    missing = [node for node in wanted if node not in traces]
    if missing:
        raise InputError(
            f"log has nodes {sorted(traces)} but config expects front/back = {wanted}"
        )
    extra = set(traces) - set(wanted)
    if extra:
        raise InputError(f"log contains unexpected node ids: {sorted(extra)}")
    return analyze_traces(traces[cfg.front_node_id], traces[cfg.back_node_id], cfg)


def header_lines(result: AnalysisResult) -> Iterable[str]:
    """Config echo and calibration summary for report headers."""
    yield from result.config.echo_lines()
    for label, params in (
        ("front", result.front_calibration),
        ("back", result.back_calibration),
    ):
        yaw = (
            f"{math.degrees(params.yaw_psi_estimate):.3f} deg"
            if params.yaw_psi_estimate is not None
            else "n/a"
        )
        flag = " GROSS-MISALIGNMENT" if params.yaw_gross_misalignment else ""
        yield (
            f"calibration[{label}]: roll {math.degrees(params.roll_phi):.3f} deg, "
            f"pitch {math.degrees(params.pitch_theta):.3f} deg, yaw~ {yaw}{flag}"
        )
