"""Reading accelerometer logs and writing analysis reports.

Log format: comma-separated with a single header line

    t_us,node_id,ax,ay,az,unit=<G|ms2>

``t_us`` is an integer microsecond counter shared by both nodes; rows carry
raw tilted-frame samples. With ``unit=G`` values are multiples of standard
gravity and are converted to m/s² on load. Values beyond the sensor's ±8 G
full-scale range are clipped and the sample is marked saturated.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .errors import InvalidValue, MalformedHeader, NonMonotoneTimestamps, UnknownUnit
from .model import FSR, GRAVITY, EventReport, Frame, SensorTrace

_HEADER_FIELDS = ("t_us", "node_id", "ax", "ay", "az")
_UNITS = {"G": GRAVITY, "ms2": 1.0}

MACHINE_COLUMNS = ("t_start", "t_end", "kind", "zone_or_label", "peak", "diag_json")


@dataclass(frozen=True)
class LogRecord:
    """One parsed log row, timestamps still in integer microseconds."""

    t_us: int
    node_id: str
    a_x: float
    a_y: float
    a_z: float


def _parse_header(line: str, path: str) -> float:
    parts = [p.strip() for p in line.strip().split(",")]
    if len(parts) != 6 or tuple(parts[:5]) != _HEADER_FIELDS or not parts[5].startswith("unit="):
        raise MalformedHeader(
            f"{path}: header must be 't_us,node_id,ax,ay,az,unit=<G|ms2>', got {line.strip()!r}"
        )
    unit = parts[5][len("unit=") :]
    if unit not in _UNITS:
        raise UnknownUnit(f"{path}: unit must be G or ms2, got {unit!r}")
    return _UNITS[unit]


def _numbered_records(lines: Iterable[str], path: str) -> Iterable[tuple[int, LogRecord]]:
    it = iter(lines)
    try:
        header = next(it)
    except StopIteration:
        raise MalformedHeader(f"{path}: empty log") from None
    scale = _parse_header(header, path)
    for lineno, line in enumerate(it, start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise InvalidValue(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
        try:
            t_us = int(parts[0])
            values = tuple(float(p) for p in parts[2:5])
        except ValueError as exc:
            raise InvalidValue(f"{path}:{lineno}: {exc}") from None
        if not all(np.isfinite(values)):
            raise InvalidValue(f"{path}:{lineno}: non-finite sample {parts[2:5]}")
        node_id = parts[1].strip()
        if not node_id:
            raise InvalidValue(f"{path}:{lineno}: empty node_id")
        yield lineno, LogRecord(
            t_us, node_id, values[0] * scale, values[1] * scale, values[2] * scale
        )


def iter_records(lines: Iterable[str], path: str = "<log>") -> Iterable[LogRecord]:
    """Yield LogRecords from log lines (header first), converting to m/s²."""
    for _, rec in _numbered_records(lines, path):
        yield rec


def parse_log(source: str | Path | TextIO, *, sample_rate_hz: float = 100.0) -> list[SensorTrace]:
    """Parse a log into one tilted-frame SensorTrace per node.

    Traces are returned in first-appearance order. Timestamps become seconds
    relative to the earliest sample in the file. Per-node timestamps must be
    non-decreasing; duplicate timestamps within a node keep the first sample.
    Out-of-range values are clipped to ±8 G and flagged as saturated.
    """
    if isinstance(source, (str, Path)):
        path = str(source)
        with open(source, "r", encoding="utf-8") as fh:
            records = list(_numbered_records(fh, path))
    else:
        records = list(_numbered_records(source, getattr(source, "name", "<log>")))
    if not records:
        raise InvalidValue("log contains a header but no samples")

    by_node: dict[str, list[LogRecord]] = defaultdict(list)
    order: list[str] = []
    for lineno, rec in records:
        if rec.node_id not in by_node:
            order.append(rec.node_id)
        prev = by_node[rec.node_id]
        if prev and rec.t_us < prev[-1].t_us:
            raise NonMonotoneTimestamps(rec.node_id, lineno)
        if prev and rec.t_us == prev[-1].t_us:
            continue  # duplicate timestamp: keep the first sample
        prev.append(rec)

    t0_us = min(recs[0].t_us for recs in by_node.values())
    traces = []
    for node_id in order:
        recs = by_node[node_id]
        t = np.array([(r.t_us - t0_us) for r in recs], dtype=float) * 1e-6
        a = np.array([(r.a_x, r.a_y, r.a_z) for r in recs], dtype=float)
        saturated = np.any(np.abs(a) > FSR, axis=1)
        np.clip(a, -FSR, FSR, out=a)
        traces.append(
            SensorTrace(
                node_id=node_id,
                t=t,
                a=a,
                frame=Frame.TILTED,
                sample_rate_hz=sample_rate_hz,
                saturated=saturated,
            )
        )
    return traces


def write_log(
    destination: str | Path | TextIO,
    traces: Iterable[SensorTrace],
    *,
    unit: str = "ms2",
) -> None:
    """Write traces as a log file (rows interleaved in time order).

    The default ms2 unit round-trips float values losslessly through repr.
    """
    if unit not in _UNITS:
        raise UnknownUnit(f"unit must be G or ms2, got {unit!r}")
    scale = _UNITS[unit]
    rows: list[tuple[int, str, float, float, float]] = []
    for trace in traces:
        for i in range(len(trace)):
            rows.append(
                (
                    int(round(trace.t[i] * 1e6)),
                    trace.node_id,
                    float(trace.a[i, 0]) / scale,
                    float(trace.a[i, 1]) / scale,
                    float(trace.a[i, 2]) / scale,
                )
            )
    rows.sort(key=lambda r: r[0])
    lines = [f"t_us,node_id,ax,ay,az,unit={unit}\n"]
    lines.extend(f"{t},{node},{x!r},{y!r},{z!r}\n" for t, node, x, y, z in rows)
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8") as fh:
            fh.writelines(lines)
    else:
        destination.writelines(lines)


def _grouped(events: list[EventReport]) -> Iterable[tuple[int, EventReport]]:
    """Run-length groups of consecutive events with identical descriptions."""
    i = 0
    while i < len(events):
        j = i + 1
        while j < len(events) and events[j].human_description == events[i].human_description:
            j += 1
        yield j - i, events[i]
        i = j


def format_human(events: list[EventReport]) -> list[str]:
    """Operator-facing summary lines, e.g. '3x RB collision'."""
    if not events:
        return ["Nothing"]
    lines = []
    for count, event in _grouped(events):
        desc = event.human_description
        lines.append(f"{count}x {desc}" if count > 1 else desc)
    return lines


def format_machine(events: list[EventReport]) -> list[str]:
    """Tab-separated event rows: t_start, t_end, kind, zone_or_label, peak, diag_json."""
    lines = []
    for ev in events:
        if ev.zone is not None:
            zone_or_label = ev.zone.code
        elif ev.severity_label is not None:
            zone_or_label = ev.severity_label.value
        else:
            zone_or_label = "-"
        diag = json.dumps(ev.diagnostics, sort_keys=True, separators=(",", ":"))
        lines.append(
            f"{ev.t_start:.6f}\t{ev.t_end:.6f}\t{ev.kind.value}\t"
            f"{zone_or_label}\t{ev.peak:.6f}\t{diag}"
        )
    return lines


def emit_report(
    destination: TextIO,
    events: list[EventReport],
    *,
    fmt: str = "human",
    header_lines: Iterable[str] = (),
) -> None:
    """Write the event report in 'human' or 'machine' format.

    ``header_lines`` (config echo, calibration summary, ...) are emitted as
    '# ' comments before the body in both formats; the machine format then
    writes a '# ' column-name line followed by one tab-separated row per
    event, so the body stays trivially greppable.
    """
    if fmt not in ("human", "machine"):
        raise InvalidValue(f"format must be 'human' or 'machine', got {fmt!r}")
    for line in header_lines:
        destination.write(f"# {line}\n")
    if fmt == "human":
        body = format_human(events)
    else:
        destination.write("# " + "\t".join(MACHINE_COLUMNS) + "\n")
        body = format_machine(events)
    for line in body:
        destination.write(line + "\n")
