"""Synthetic dual-node trace generator with ground truth.

Each scenario kind follows the physical signature the detector keys on:

* collisions ring the lateral axis — a damped sinusoid on a_y, signed by
  impact side, attenuated on the node far from the impact;
* surface vibrations shake the vertical axis — band-limited noise bursts
  on a_z with weak planar bleed;
* braking pushes the longitudinal axis to one side — a negative raised-
  cosine plateau on a_x (sudden starts are the positive mirror image);
* load pickup and fork contact are weak, inconsistent multi-axis bursts
  kept below the detector's trigger on purpose.

Waveforms are built in the leveled, gravity-free frame and normalized so
the two-node mean magnitude peaks exactly at the requested severity level;
gravity is then added, the optional mounting misalignment rotates the
result into the sensor frame, and Gaussian sensor noise plus full-scale
clipping are applied per node. Everything is driven by explicit seeds:
identical inputs give byte-identical traces.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .calibration import euler_321
from .config import AnalysisConfig
from .errors import InvalidValue, OverlappingSpecs
from .model import FSR, EventKind, Frame, MountPosition, SensorTrace, SeverityLabel, Zone

_DEFAULT_CFG = AnalysisConfig()

NOISE_SIGMA_DEFAULT = 0.05  # m/s², per axis, sensor frame

# Mean-magnitude peak targets (m/s²) per severity grade. very_soft sits
# below the 5 m/s² trigger; hard approaches the sensor's full-scale range.
COLLISION_PEAK = {"very_soft": 3.0, "soft": 6.0}
COLLISION_PEAK_HARD = (25.0, 50.0)
FAR_NODE_GAIN = 0.4

BRAKING_PEAK = {"soft": 3.0, "hard": 7.0, "very_hard": 12.0}
SUDDEN_START_PEAK = 7.0
TRUCK_LOADING_PEAK = (6.5, 14.0)
BUMP_PEAK_NORMAL = (8.0, 18.0)
BUMP_PEAK_FAST = (26.0, 45.0)
PICKUP_PEAK = (2.5, 4.2)
FORK_CONTACT_PEAK = (2.0, 3.5)


class Severity(enum.Enum):
    VERY_SOFT = "very_soft"
    SOFT = "soft"
    HARD = "hard"


class BumpSpeed(enum.Enum):
    NORMAL = "normal"
    FAST = "fast"


class BrakingIntensity(enum.Enum):
    SOFT = "soft"
    HARD = "hard"
    VERY_HARD = "very_hard"


class ScenarioKind(enum.Enum):
    COLLISION = "collision"
    BUMPY_DRIVING = "bumpy_driving"
    TRUCK_LOADING = "truck_loading"
    BRAKING = "braking"
    SUDDEN_START = "sudden_start"
    LOAD_PICKUP = "load_pickup"
    FORK_CONTACT = "fork_contact"
    IDLE = "idle"


@dataclass(frozen=True)
class ScenarioSpec:
    """One injected event (or idle stretch) on the generated timeline."""

    kind: ScenarioKind
    t_onset: float
    duration: float
    rng_seed: int
    zone: Zone | None = None
    severity: Severity | None = None
    speed: BumpSpeed | None = None
    intensity: BrakingIntensity | None = None

    def __post_init__(self) -> None:
        if self.t_onset < 0.0 or self.duration <= 0.0:
            raise InvalidValue("spec needs t_onset >= 0 and duration > 0")
        if self.kind is ScenarioKind.COLLISION:
            if self.zone is None or self.severity is None:
                raise InvalidValue("collision specs need zone and severity")
        elif self.kind is ScenarioKind.BUMPY_DRIVING:
            if self.speed is None:
                raise InvalidValue("bumpy-driving specs need a speed")
        elif self.kind is ScenarioKind.BRAKING:
            if self.intensity is None:
                raise InvalidValue("braking specs need an intensity")

    @property
    def t_end(self) -> float:
        return self.t_onset + self.duration


_ALL_KINDS = frozenset(EventKind)
_VIBRATIONS = frozenset({EventKind.VIBRATION_SHORT, EventKind.VIBRATION_LONG})
_SEVERE = frozenset({EventKind.COLLISION, EventKind.HARSH_BRAKING})


@dataclass(frozen=True)
class TruthEntry:
    """What the detector is expected to report for one injected spec.

    ``required``: at least one event of one of these kinds must overlap the
    spec window (empty set = nothing required). ``forbidden``: no event of
    these kinds may overlap. ``expected_zone`` / ``expected_label`` refine a
    matched required event when set.
    """

    spec: ScenarioSpec
    t_peak: float
    required: frozenset[EventKind]
    forbidden: frozenset[EventKind]
    expected_zone: Zone | None = None
    expected_label: SeverityLabel | None = None

    @property
    def onset_to_peak(self) -> float:
        return self.t_peak - self.spec.t_onset


@dataclass(frozen=True)
class GroundTruth:
    entries: tuple[TruthEntry, ...] = field(default_factory=tuple)

    def __iter__(self) -> Iterator[TruthEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def _band_limited(rng: np.random.Generator, n: int) -> np.ndarray:
    """Unit-scale low-pass noise: white Gaussian smoothed by a Hann kernel."""
    kernel = np.hanning(7)
    kernel /= kernel.sum()
    return np.convolve(rng.standard_normal(n), kernel, mode="same")


def _hann_envelope(n: int) -> np.ndarray:
    x = np.arange(n) / max(n - 1, 1)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * x))


def _plateau_envelope(n: int, ramp_frac: float = 0.15) -> np.ndarray:
    """Flat-topped window with raised-cosine ramps (Tukey shape)."""
    x = np.arange(n) / max(n - 1, 1)
    env = np.ones(n)
    rise = x < ramp_frac
    fall = x > 1.0 - ramp_frac
    env[rise] = 0.5 * (1.0 - np.cos(np.pi * x[rise] / ramp_frac))
    env[fall] = 0.5 * (1.0 - np.cos(np.pi * (1.0 - x[fall]) / ramp_frac))
    return env


def _end_taper(n: int, frac: float = 0.2) -> np.ndarray:
    """Unity except for a raised-cosine decay to zero over the last frac."""
    x = np.arange(n) / max(n - 1, 1)
    taper = np.ones(n)
    tail = x > 1.0 - frac
    taper[tail] = 0.5 * (1.0 + np.cos(np.pi * (x[tail] - (1.0 - frac)) / frac))
    return taper


def _normalized(
    front: np.ndarray, back: np.ndarray, target_peak: float
) -> tuple[np.ndarray, np.ndarray, int]:
    """Scale a wave pair so the two-node mean magnitude peaks at target."""
    mean_mag = 0.5 * (
        np.linalg.norm(front, axis=1) + np.linalg.norm(back, axis=1)
    )
    i_peak = int(np.argmax(mean_mag))
    peak = mean_mag[i_peak]
    if peak <= 0.0:
        raise InvalidValue("wave has zero amplitude; cannot normalize")
    s = target_peak / peak
    return front * s, back * s, i_peak


def _collision_wave(
    t_local: np.ndarray, spec: ScenarioSpec, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, int]:
    d = spec.duration
    # Ring frequency ~2.5 cycles per event, capped well below Nyquist: at an
    # exact quarter of the sample rate every other sample would land on a
    # zero crossing and a weak impact could vanish between two samples. The
    # phase offset keeps the sampled lobe populated for the same reason.
    freq = min(2.5 / d, 22.0)
    tau = d / 3.0
    ring = np.exp(-t_local / tau) * np.sin(2.0 * np.pi * freq * t_local + np.pi / 4.0)
    ring *= _end_taper(t_local.size)
    sign = 1.0 if spec.zone.is_right else -1.0
    wave = np.column_stack([0.12 * ring, sign * ring, 0.2 * ring])
    near, far = wave, FAR_NODE_GAIN * wave
    if spec.zone.is_front:
        front, back = near, far
    else:
        front, back = far, near
    if spec.severity is Severity.HARD:
        target = rng.uniform(*COLLISION_PEAK_HARD)
    else:
        target = COLLISION_PEAK[spec.severity.value]
    return _normalized(front, back, target)


def _vibration_wave(
    t_local: np.ndarray,
    rng: np.random.Generator,
    target_peak: float,
    *,
    planar_gain: float = 0.3,
) -> tuple[np.ndarray, np.ndarray, int]:
    n = t_local.size
    env = _hann_envelope(n)
    def burst(gain: float) -> np.ndarray:
        return gain * _band_limited(rng, n) * env
    front = np.column_stack([burst(planar_gain), burst(0.2), burst(1.0)])
    back = np.column_stack([burst(planar_gain), burst(0.2), burst(0.9)])
    return _normalized(front, back, target_peak)


def _plateau_wave(
    t_local: np.ndarray,
    rng: np.random.Generator,
    target_peak: float,
    sign: float,
) -> tuple[np.ndarray, np.ndarray, int]:
    n = t_local.size
    env = _plateau_envelope(n)
    def make() -> np.ndarray:
        rumble = 0.12 * _band_limited(rng, n) * env
        sway = 0.06 * _band_limited(rng, n) * env
        return np.column_stack([sign * env, sway, rumble])
    return _normalized(make(), make(), target_peak)


def _weak_burst_wave(
    t_local: np.ndarray,
    rng: np.random.Generator,
    target_peak: float,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Inconsistent multi-axis wobble, deliberately near the noise floor."""
    n = t_local.size
    env = _hann_envelope(n)
    def burst(gain: float) -> np.ndarray:
        return gain * _band_limited(rng, n) * env
    front = np.column_stack([burst(0.6), burst(0.8), burst(1.0)])
    back = np.column_stack([burst(0.7), burst(0.6), burst(0.9)])
    return _normalized(front, back, target_peak)


def _truth_for(
    spec: ScenarioSpec, t_peak: float, label_hint: SeverityLabel | None
) -> TruthEntry:
    kind = spec.kind
    if kind is ScenarioKind.COLLISION:
        if spec.severity is Severity.VERY_SOFT:
            return TruthEntry(spec, t_peak, frozenset(), frozenset({EventKind.COLLISION}))
        return TruthEntry(
            spec,
            t_peak,
            frozenset({EventKind.COLLISION}),
            frozenset(),
            expected_zone=spec.zone,
        )
    if kind in (ScenarioKind.BUMPY_DRIVING, ScenarioKind.TRUCK_LOADING):
        return TruthEntry(spec, t_peak, _VIBRATIONS, _SEVERE, expected_label=label_hint)
    if kind is ScenarioKind.BRAKING:
        if spec.intensity is BrakingIntensity.SOFT:
            return TruthEntry(spec, t_peak, frozenset(), _SEVERE)
        return TruthEntry(
            spec,
            t_peak,
            frozenset({EventKind.HARSH_BRAKING}),
            frozenset({EventKind.COLLISION}),
        )
    if kind in (ScenarioKind.SUDDEN_START, ScenarioKind.LOAD_PICKUP, ScenarioKind.FORK_CONTACT):
        return TruthEntry(spec, t_peak, frozenset(), _SEVERE)
    return TruthEntry(spec, t_peak, frozenset(), _ALL_KINDS)  # idle


def _spec_wave(
    spec: ScenarioSpec, t_local: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, int, SeverityLabel | None]:
    """Dispatch to the waveform family; returns (front, back, i_peak, label)."""
    kind = spec.kind
    if kind is ScenarioKind.COLLISION:
        return *_collision_wave(t_local, spec, rng), None
    if kind is ScenarioKind.TRUCK_LOADING:
        return *_vibration_wave(t_local, rng, rng.uniform(*TRUCK_LOADING_PEAK)), SeverityLabel.BT
    if kind is ScenarioKind.BUMPY_DRIVING:
        if spec.speed is BumpSpeed.FAST:
            target, label = rng.uniform(*BUMP_PEAK_FAST), SeverityLabel.AT
        else:
            target, label = rng.uniform(*BUMP_PEAK_NORMAL), SeverityLabel.BT
        return *_vibration_wave(t_local, rng, target), label
    if kind is ScenarioKind.BRAKING:
        target = BRAKING_PEAK[spec.intensity.value]
        return *_plateau_wave(t_local, rng, target, sign=-1.0), None
    if kind is ScenarioKind.SUDDEN_START:
        return *_plateau_wave(t_local, rng, SUDDEN_START_PEAK, sign=1.0), None
    if kind is ScenarioKind.LOAD_PICKUP:
        return *_weak_burst_wave(t_local, rng, rng.uniform(*PICKUP_PEAK)), None
    if kind is ScenarioKind.FORK_CONTACT:
        return *_weak_burst_wave(t_local, rng, rng.uniform(*FORK_CONTACT_PEAK)), None
    raise InvalidValue(f"no waveform for {kind}")  # pragma: no cover


def generate(
    specs: list[ScenarioSpec] | tuple[ScenarioSpec, ...],
    cfg: AnalysisConfig = _DEFAULT_CFG,
    *,
    seed: int = 0,
    noise_sigma: float = NOISE_SIGMA_DEFAULT,
    total_duration: float | None = None,
    roll_deg: float = 0.0,
    pitch_deg: float = 0.0,
    yaw_deg: float = 0.0,
) -> tuple[SensorTrace, SensorTrace, GroundTruth]:
    """Generate a raw tilted-frame front/back trace pair plus ground truth.

    Specs must not overlap in time. The traces cover [0, total_duration]
    (default: 2 s past the last spec, at least 10 s) at cfg.sample_rate.
    roll/pitch/yaw inject a mounting misalignment; noise is drawn per node
    in the sensor frame and the result is clipped to the ±8 G full-scale
    range with saturation flags.
    """
    ordered = sorted(specs, key=lambda s: s.t_onset)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.t_onset < prev.t_end:
            raise OverlappingSpecs(
                f"{cur.kind.value} at {cur.t_onset:.2f}s overlaps "
                f"{prev.kind.value} ending {prev.t_end:.2f}s"
            )
    if total_duration is None:
        last = max((s.t_end for s in ordered), default=0.0)
        total_duration = max(last + 2.0, 10.0)
    elif ordered and ordered[-1].t_end > total_duration:
        raise InvalidValue("total_duration does not cover the last spec")

    rate = cfg.sample_rate
    n = int(round(total_duration * rate)) + 1
    t = np.arange(n) / rate
    front_lvl = np.zeros((n, 3))
    back_lvl = np.zeros((n, 3))

    entries = []
    for spec in ordered:
        if spec.kind is ScenarioKind.IDLE:
            entries.append(_truth_for(spec, spec.t_onset, None))
            continue
        i0 = int(round(spec.t_onset * rate))
        # Rounding t_onset up and duration down (or vice versa) can push the
        # window one sample past the trace when a spec ends flush with
        # total_duration; clamp rather than crash.
        n_w = min(int(round(spec.duration * rate)) + 1, n - i0)
        t_local = np.arange(n_w) / rate
        rng = np.random.default_rng(spec.rng_seed)
        wf, wb, i_peak, label = _spec_wave(spec, t_local, rng)
        front_lvl[i0 : i0 + n_w] += wf
        back_lvl[i0 : i0 + n_w] += wb
        entries.append(_truth_for(spec, t[i0 + i_peak], label))

    front_lvl[:, 2] += cfg.gravity
    back_lvl[:, 2] += cfg.gravity
    r = euler_321(np.radians(roll_deg), np.radians(pitch_deg), np.radians(yaw_deg))
    front_raw = front_lvl @ r.T
    back_raw = back_lvl @ r.T

    noise = np.random.default_rng(seed)
    front_raw = front_raw + noise.normal(0.0, noise_sigma, (n, 3))
    back_raw = back_raw + noise.normal(0.0, noise_sigma, (n, 3))

    def to_trace(a: np.ndarray, node_id: str, position: MountPosition) -> SensorTrace:
        saturated = np.any(np.abs(a) > FSR, axis=1)
        return SensorTrace(
            node_id=node_id,
            t=t,
            a=np.clip(a, -FSR, FSR),
            frame=Frame.TILTED,
            position=position,
            sample_rate_hz=rate,
            saturated=saturated,
        )

    return (
        to_trace(front_raw, cfg.front_node_id, MountPosition.FRONT),
        to_trace(back_raw, cfg.back_node_id, MountPosition.BACK),
        GroundTruth(tuple(entries)),
    )
