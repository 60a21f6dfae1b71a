"""Decision tree turning segments into classified, localized events.

Routing: short segments (or intermediate ones with an oscillatory
longitudinal signal) are split into collision vs. vibration by comparing
lateral and vertical areas on the dominant node; long segments are split
into braking vs. vibration by baseline-crossing rate. Braking is confirmed
by the sign of the net longitudinal area — positive means acceleration
(sudden start) and is suppressed, as are brakings below the harsh peak
threshold. Collisions are localized to a corner zone from the dominant node
and the sign of its net lateral area.

Area features use the dominant node's raw channels (not the two-node mean)
so a one-sided impact is not blurred by the far sensor.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any

import numpy as np

from .config import AnalysisConfig, BrakingAxis
from .errors import EmptySegment
from .model import (
    EventKind,
    EventReport,
    FusedTrace,
    MountPosition,
    Segment,
    SeverityLabel,
    Zone,
)

_DEFAULT_CFG = AnalysisConfig()


class Route(enum.Enum):
    SHORT = "short"
    LONG = "long"


class ShortClass(enum.Enum):
    COLLISION_CANDIDATE = "collision_candidate"
    SHORT_VIBRATION = "short_vibration"


class LongClass(enum.Enum):
    BRAKING_CANDIDATE = "braking_candidate"
    LONG_VIBRATION = "long_vibration"


class BrakingOutcome(enum.Enum):
    HARSH_BRAKING = "harsh_braking"
    ACCELERATION = "acceleration"  # sudden start; suppressed
    BELOW_HARSH = "below_harsh"  # ordinary braking; suppressed


@dataclass(frozen=True)
class SegmentFeatures:
    """Per-segment scalar features feeding the decision tree.

    Areas are time integrals in m/s. ``ratio_ax`` is |net| / total of the
    mean longitudinal signal, in [0, 1] (0 when the total area vanishes):
    one-sided signals such as braking score near 1, oscillations near 0.
    ``dominant_node`` holds the largest single |a_y| sample; its lateral and
    vertical areas discriminate collision from vibration, and the sign of
    its net lateral area gives the impact side. ``crossing_rate`` counts
    sign changes per second of the mean-removed mean a_x.
    """

    duration: float
    net_area_ax: float
    total_area_ax: float
    ratio_ax: float
    dominant_node: MountPosition
    area_ay_dom: float
    area_az_dom: float
    peak_ay_dom: float
    net_ay_dom: float
    net_ax: float
    crossing_rate: float
    peak_a_total_mean: float


def _crossings(x: np.ndarray) -> int:
    """Sign changes of the mean-removed signal, ignoring exact zeros."""
    centered = x - x.mean()
    signs = np.sign(centered)
    signs = signs[signs != 0]
    if signs.size < 2:
        return 0
    return int(np.count_nonzero(np.diff(signs)))


def compute_features(seg: Segment, fused: FusedTrace) -> SegmentFeatures:
    """Compute the feature block for one segment of a fused trace."""
    i0, i1 = seg.i_start, seg.i_end
    if i1 - i0 < 2:
        raise EmptySegment(f"segment [{i0}:{i1}] has fewer than two samples")
    t = fused.t[i0:i1]
    front = fused.front.a[i0:i1]
    back = fused.back.a[i0:i1]
    mean_ax = 0.5 * (front[:, 0] + back[:, 0])

    net_ax = float(np.trapezoid(mean_ax, t))
    total_area_ax = float(np.trapezoid(np.abs(mean_ax), t))
    net_area_ax = abs(net_ax)
    ratio_ax = net_area_ax / total_area_ax if total_area_ax > 0.0 else 0.0

    # Dominant node: highest single |a_y| sample; the front node wins ties.
    peak_front = float(np.abs(front[:, 1]).max())
    peak_back = float(np.abs(back[:, 1]).max())
    if peak_front >= peak_back:
        dominant, dom_a = MountPosition.FRONT, front
    else:
        dominant, dom_a = MountPosition.BACK, back
    ay, az = dom_a[:, 1], dom_a[:, 2]
    peak_ay_dom = float(ay[np.argmax(np.abs(ay))])

    duration = seg.duration
    return SegmentFeatures(
        duration=duration,
        net_area_ax=net_area_ax,
        total_area_ax=total_area_ax,
        ratio_ax=ratio_ax,
        dominant_node=dominant,
        area_ay_dom=float(np.trapezoid(np.abs(ay), t)),
        area_az_dom=float(np.trapezoid(np.abs(az), t)),
        peak_ay_dom=peak_ay_dom,
        net_ay_dom=float(np.trapezoid(ay, t)),
        net_ax=net_ax,
        crossing_rate=_crossings(mean_ax) / duration,
        peak_a_total_mean=seg.peak_a_total_mean,
    )


def categorize(seg: Segment, f: SegmentFeatures, cfg: AnalysisConfig = _DEFAULT_CFG) -> Route:
    """Route by duration; intermediate durations route by ratio_ax."""
    if f.duration <= cfg.short_max:
        return Route.SHORT
    if f.duration >= cfg.long_min:
        return Route.LONG
    return Route.LONG if f.ratio_ax > cfg.ratio_long else Route.SHORT


def classify_short(f: SegmentFeatures) -> ShortClass:
    """Lateral-dominant short segments are collision candidates.

    Equal areas fall to vibration: collision requires strictly more lateral
    than vertical energy on the dominant node.
    """
    if f.area_ay_dom > f.area_az_dom:
        return ShortClass.COLLISION_CANDIDATE
    return ShortClass.SHORT_VIBRATION


def localize(f: SegmentFeatures) -> Zone:
    """Corner zone of a collision: node gives front/back, net a_y gives side.

    Positive net lateral acceleration means the truck was pushed left, i.e.
    the impact came from the right. Zero net falls to the right.
    """
    right = f.net_ay_dom >= 0.0
    front = f.dominant_node is MountPosition.FRONT
    return Zone.from_sides(front=front, right=right)


def classify_long(f: SegmentFeatures, cfg: AnalysisConfig = _DEFAULT_CFG) -> LongClass:
    """Few baseline crossings mean braking; oscillation means vibration."""
    if f.crossing_rate <= cfg.crossing_rate_braking_max:
        return LongClass.BRAKING_CANDIDATE
    return LongClass.LONG_VIBRATION


def confirm_braking(f: SegmentFeatures, cfg: AnalysisConfig = _DEFAULT_CFG) -> BrakingOutcome:
    """Sign-test the net area on the braking axis, then gate on peak.

    Net >= 0 reads as acceleration (a sudden start, not braking) and is
    suppressed; confirmed braking is reported only above the harsh peak
    threshold.
    """
    net = f.net_ax if cfg.braking_axis is BrakingAxis.X else f.net_ay_dom
    if net >= 0.0:
        return BrakingOutcome.ACCELERATION
    if f.peak_a_total_mean > cfg.harsh_braking_threshold:
        return BrakingOutcome.HARSH_BRAKING
    return BrakingOutcome.BELOW_HARSH


def label_vibration(f: SegmentFeatures, cfg: AnalysisConfig = _DEFAULT_CFG) -> SeverityLabel:
    """AT above the severe peak threshold (strictly), BT otherwise."""
    if f.peak_a_total_mean > cfg.vibration_severe:
        return SeverityLabel.AT
    return SeverityLabel.BT


def classify_segment(
    seg: Segment,
    fused: FusedTrace,
    cfg: AnalysisConfig = _DEFAULT_CFG,
) -> EventReport | None:
    """Run the full decision tree on one segment.

    Returns None for suppressed outcomes (acceleration / sub-harsh braking).
    The report's diagnostics carry every branch decision plus the raw
    feature values, enough to replay the tree offline.
    """
    f = compute_features(seg, fused)
    route = categorize(seg, f, cfg)
    diag: dict[str, Any] = {
        "route": route.value,
        "duration": f.duration,
        "ratio_ax": f.ratio_ax,
        "net_ax": f.net_ax,
        "total_area_ax": f.total_area_ax,
        "dominant_node": f.dominant_node.value,
        "area_ay_dom": f.area_ay_dom,
        "area_az_dom": f.area_az_dom,
        "peak_ay_dom": f.peak_ay_dom,
        "net_ay_dom": f.net_ay_dom,
        "crossing_rate": f.crossing_rate,
        "peak_a_total_mean": f.peak_a_total_mean,
    }

    if route is Route.SHORT:
        short = classify_short(f)
        diag["short_class"] = short.value
        if short is ShortClass.COLLISION_CANDIDATE:
            zone = localize(f)
            diag["zone"] = zone.code
            return EventReport(
                kind=EventKind.COLLISION,
                t_start=seg.t_start,
                t_end=seg.t_end,
                peak=f.peak_a_total_mean,
                zone=zone,
                diagnostics=diag,
            )
        label = label_vibration(f, cfg)
        diag["severity_label"] = label.value
        return EventReport(
            kind=EventKind.VIBRATION_SHORT,
            t_start=seg.t_start,
            t_end=seg.t_end,
            peak=f.peak_a_total_mean,
            severity_label=label,
            diagnostics=diag,
        )

    long_class = classify_long(f, cfg)
    diag["long_class"] = long_class.value
    if long_class is LongClass.BRAKING_CANDIDATE:
        outcome = confirm_braking(f, cfg)
        diag["braking_outcome"] = outcome.value
        if outcome is BrakingOutcome.HARSH_BRAKING:
            return EventReport(
                kind=EventKind.HARSH_BRAKING,
                t_start=seg.t_start,
                t_end=seg.t_end,
                peak=f.peak_a_total_mean,
                diagnostics=diag,
            )
        return None  # acceleration or sub-harsh braking: suppressed
    label = label_vibration(f, cfg)
    diag["severity_label"] = label.value
    return EventReport(
        kind=EventKind.VIBRATION_LONG,
        t_start=seg.t_start,
        t_end=seg.t_end,
        peak=f.peak_a_total_mean,
        severity_label=label,
        diagnostics=diag,
    )
