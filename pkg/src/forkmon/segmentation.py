"""Candidate-event extraction from the fused magnitude series.

A sample with mean magnitude above the trigger threshold starts a candidate;
the candidate extends backward and forward until the signal drops below the
release threshold (trace boundaries clamp). Candidates separated by at most
the merge gap collapse into one, and anything shorter than the minimum
duration is discarded. Merging runs before the duration filter so two short
bursts straddling a gap survive as one event.
"""

from __future__ import annotations

import numpy as np

from .config import AnalysisConfig
from .model import FusedTrace, Segment

_DEFAULT_CFG = AnalysisConfig()


def _release_runs(signal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Maximal runs of samples at or above the release threshold.

    Returns (starts, ends) index arrays, ends exclusive. The caller has
    already thresholded ``signal`` into a boolean mask.
    """
    padded = np.empty(signal.size + 2, dtype=np.int8)
    padded[0] = padded[-1] = 0
    padded[1:-1] = signal
    d = np.diff(padded)
    return np.flatnonzero(d == 1), np.flatnonzero(d == -1)


def extract_segments(fused: FusedTrace, cfg: AnalysisConfig = _DEFAULT_CFG) -> list[Segment]:
    """Extract disjoint, time-ordered event segments from a fused trace.

    Segments are the maximal windows of a_total_mean >= release_threshold
    that contain at least one strictly-above-trigger sample, after merging
    windows separated by <= merge_gap seconds and dropping those shorter
    than min_segment. Returns [] when nothing triggers.
    """
    signal = fused.a_total_mean
    t = fused.t
    starts, ends = _release_runs(signal >= cfg.release_threshold)
    if starts.size == 0:
        return []

    # Keep only runs holding at least one strict trigger exceedance.
    trig_cum = np.concatenate(([0], np.cumsum(signal > cfg.trigger_threshold)))
    hot = trig_cum[ends] > trig_cum[starts]
    starts, ends = starts[hot], ends[hot]
    if starts.size == 0:
        return []

    # Merge neighbours whose silent gap is within merge_gap (inclusive).
    merged: list[list[int]] = [[int(starts[0]), int(ends[0])]]
    for s, e in zip(starts[1:], ends[1:]):
        gap = t[s] - t[merged[-1][1] - 1]
        if gap <= cfg.merge_gap:
            merged[-1][1] = int(e)
        else:
            merged.append([int(s), int(e)])

    segments = []
    for s, e in merged:
        t_start, t_end = float(t[s]), float(t[e - 1])
        if t_end - t_start < cfg.min_segment:
            continue
        segments.append(
            Segment(
                t_start=t_start,
                t_end=t_end,
                i_start=s,
                i_end=e,
                peak_a_total_mean=float(signal[s:e].max()),
            )
        )
    return segments
