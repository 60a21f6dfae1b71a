"""Core domain types and axis conventions.

Axis convention (fixed, everything downstream depends on it):

* ``x`` — longitudinal, positive = forklift forward
* ``y`` — lateral, positive = leftward; a positive net ``a_y`` therefore
  indicates a right-side impact
* ``z`` — vertical, positive = up; at static rest in the leveled frame
  ``a_z`` reads close to ``+g`` until gravity is compensated

All accelerations are meters per second squared, with ``g`` fixed at
9.81 m/s² exactly. Sensor full-scale range is ±8 g; values beyond it are
clipped at ingestion and flagged as saturated rather than rejected (a hard
collision legitimately rails the sensor).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterator

import numpy as np

from .errors import FrameMismatch, NoOverlap

if TYPE_CHECKING:
    from .classify import SegmentFeatures

GRAVITY = 9.81
FSR = 8.0 * GRAVITY  # 78.48 m/s², ±8 g accelerometer range


class MountPosition(enum.Enum):
    FRONT = "front"
    BACK = "back"


class Frame(enum.Enum):
    """Processing state of a trace; transitions only left to right."""

    TILTED = "tilted"
    LEVELED = "leveled"
    LEVELED_GRAVITY_COMPENSATED = "leveled_gravity_compensated"


class Zone(enum.Enum):
    """Collision location on the vehicle, left/right x front/back."""

    LEFT_FRONT = "LF"
    RIGHT_FRONT = "RF"
    LEFT_BACK = "LB"
    RIGHT_BACK = "RB"

    @property
    def code(self) -> str:
        return self.value

    @property
    def is_right(self) -> bool:
        return self in (Zone.RIGHT_FRONT, Zone.RIGHT_BACK)

    @property
    def is_front(self) -> bool:
        return self in (Zone.LEFT_FRONT, Zone.RIGHT_FRONT)

    @staticmethod
    def from_sides(front: bool, right: bool) -> "Zone":
        if front:
            return Zone.RIGHT_FRONT if right else Zone.LEFT_FRONT
        return Zone.RIGHT_BACK if right else Zone.LEFT_BACK

    @property
    def mirrored_lr(self) -> "Zone":
        return Zone.from_sides(self.is_front, not self.is_right)

    @property
    def mirrored_fb(self) -> "Zone":
        return Zone.from_sides(not self.is_front, self.is_right)


class SeverityLabel(enum.Enum):
    """Vibration severity relative to the 22 m/s² mean-magnitude threshold."""

    BT = "BT"
    AT = "AT"

    @property
    def human(self) -> str:
        return "AT!" if self is SeverityLabel.AT else "BT"


class EventKind(enum.Enum):
    COLLISION = "collision"
    HARSH_BRAKING = "harsh_braking"
    VIBRATION_SHORT = "vibration_short"
    VIBRATION_LONG = "vibration_long"


@dataclass(frozen=True)
class ImuSample:
    """One timestamped 3-axis acceleration reading from one node."""

    t: float
    a_x: float
    a_y: float
    a_z: float
    saturated: bool = False


def a_total(sample: ImuSample) -> float:
    """Euclidean magnitude of the acceleration vector, in m/s²."""
    return math.sqrt(sample.a_x**2 + sample.a_y**2 + sample.a_z**2)


def _frozen(array: np.ndarray, dtype=float) -> np.ndarray:
    out = np.array(array, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SensorTrace:
    """Time-ordered samples from one node.

    ``t`` is seconds from trace start (strictly increasing), ``a`` is an
    (N, 3) array of x/y/z accelerations in m/s² and ``saturated`` marks
    samples that were clipped to the sensor's full-scale range.
    """

    node_id: str
    t: np.ndarray
    a: np.ndarray
    frame: Frame = Frame.TILTED
    position: MountPosition | None = None
    sample_rate_hz: float = 100.0
    saturated: np.ndarray | None = None

    def __post_init__(self) -> None:
        t = _frozen(self.t)
        a = _frozen(self.a)
        if t.ndim != 1 or a.shape != (t.size, 3):
            raise ValueError(f"trace {self.node_id!r}: t must be (N,), a must be (N, 3)")
        if t.size == 0:
            raise ValueError(f"trace {self.node_id!r}: empty")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(a)):
            raise ValueError(f"trace {self.node_id!r}: non-finite values")
        if t[0] < 0.0 or (t.size > 1 and np.any(np.diff(t) <= 0.0)):
            raise ValueError(f"trace {self.node_id!r}: t must be non-negative and strictly increasing")
        sat = self.saturated
        sat = np.zeros(t.size, dtype=bool) if sat is None else _frozen(sat, dtype=bool)
        if sat.shape != t.shape:
            raise ValueError(f"trace {self.node_id!r}: saturated mask shape mismatch")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "saturated", sat)

    def __len__(self) -> int:
        return int(self.t.size)

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def a_x(self) -> np.ndarray:
        return self.a[:, 0]

    @property
    def a_y(self) -> np.ndarray:
        return self.a[:, 1]

    @property
    def a_z(self) -> np.ndarray:
        return self.a[:, 2]

    @property
    def gap_count(self) -> int:
        """Number of inter-sample gaps outside ±20% of the nominal period."""
        if len(self) < 2:
            return 0
        dt = np.diff(self.t)
        nominal = 1.0 / self.sample_rate_hz
        return int(np.count_nonzero((dt < 0.8 * nominal) | (dt > 1.2 * nominal)))

    @property
    def gappy(self) -> bool:
        return self.gap_count > 0

    @property
    def samples(self) -> Iterator[ImuSample]:
        for i in range(len(self)):
            yield ImuSample(
                float(self.t[i]),
                float(self.a[i, 0]),
                float(self.a[i, 1]),
                float(self.a[i, 2]),
                bool(self.saturated[i]),
            )

    def magnitude(self) -> np.ndarray:
        """Per-sample Euclidean magnitude series."""
        return np.linalg.norm(self.a, axis=1)

    def with_position(self, position: MountPosition) -> "SensorTrace":
        return replace(self, position=position)

    def slice(self, i_start: int, i_end: int) -> "SensorTrace":
        return replace(
            self,
            t=self.t[i_start:i_end],
            a=self.a[i_start:i_end],
            saturated=self.saturated[i_start:i_end],
        )


@dataclass(frozen=True)
class FusedTrace:
    """Front and back traces resampled onto one grid, with magnitude series.

    ``a_total_mean`` is the per-sample average of the two node magnitudes;
    it is the signal all segmentation thresholds run on.
    """

    front: SensorTrace
    back: SensorTrace
    a_total_front: np.ndarray
    a_total_back: np.ndarray
    a_total_mean: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.front)
        if len(self.back) != n:
            raise ValueError("front and back must share one grid")
        if not np.array_equal(self.front.t, self.back.t):
            raise ValueError("front and back time grids differ")
        for name in ("a_total_front", "a_total_back", "a_total_mean"):
            series = _frozen(getattr(self, name))
            if series.shape != (n,):
                raise ValueError(f"{name} has wrong shape")
            object.__setattr__(self, name, series)

    @property
    def t(self) -> np.ndarray:
        return self.front.t

    @property
    def sample_rate_hz(self) -> float:
        return self.front.sample_rate_hz

    def __len__(self) -> int:
        return len(self.front)

    def node(self, position: MountPosition) -> SensorTrace:
        return self.front if position is MountPosition.FRONT else self.back


@dataclass(frozen=True)
class Segment:
    """Contiguous high-activity window on the fused mean-magnitude signal.

    ``i_start``/``i_end`` index the fused grid (end exclusive) and apply to
    both per-node traces, which share that grid.
    """

    t_start: float
    t_end: float
    i_start: int
    i_end: int
    peak_a_total_mean: float
    features: "SegmentFeatures | None" = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.t_end > self.t_start:
            raise ValueError("segment duration must be positive")
        if not self.i_end > self.i_start:
            raise ValueError("segment index range must be non-empty")

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class EventReport:
    """Final classification of one segment.

    ``diagnostics`` carries every feature value used at each branch of the
    decision tree, enough to replay the classification offline.
    """

    kind: EventKind
    t_start: float
    t_end: float
    peak: float
    zone: Zone | None = None
    severity_label: SeverityLabel | None = None
    diagnostics: dict[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.kind is EventKind.COLLISION:
            if self.zone is None:
                raise ValueError("collision reports must carry a zone")
            if self.severity_label is not None:
                raise ValueError("severity labels apply to vibrations only")
        elif self.kind in (EventKind.VIBRATION_SHORT, EventKind.VIBRATION_LONG):
            if self.severity_label is None:
                raise ValueError("vibration reports must carry a severity label")
            if self.zone is not None:
                raise ValueError("zones apply to collisions only")
        else:
            if self.zone is not None or self.severity_label is not None:
                raise ValueError("braking reports carry neither zone nor label")

    @property
    def human_description(self) -> str:
        """Event wording used by the human report, e.g. ``RB collision``."""
        if self.kind is EventKind.COLLISION:
            return f"{self.zone.code} collision"
        if self.kind is EventKind.HARSH_BRAKING:
            return "braking"
        length = "short" if self.kind is EventKind.VIBRATION_SHORT else "long"
        return f"{length} vibration {self.severity_label.human}"


def _on_own_grid(trace: SensorTrace) -> bool:
    grid = trace.t[0] + np.arange(len(trace)) / trace.sample_rate_hz
    return bool(np.array_equal(trace.t, grid))


def resample_align(front: SensorTrace, back: SensorTrace) -> FusedTrace:
    """Interpolate both traces onto the common grid of their time overlap.

    Both traces must already be gravity-compensated. The output grid runs at
    the front trace's nominal rate, starting at the later of the two trace
    starts. Aligning an already-aligned pair is the identity.

    Raises NoOverlap if the time spans are disjoint and FrameMismatch if
    either trace has not been leveled and gravity-compensated.
    """
    for trace in (front, back):
        if trace.frame is not Frame.LEVELED_GRAVITY_COMPENSATED:
            raise FrameMismatch(
                f"trace {trace.node_id!r} is in frame {trace.frame.value}, "
                "expected leveled_gravity_compensated"
            )
    t0 = max(float(front.t[0]), float(back.t[0]))
    t1 = min(float(front.t[-1]), float(back.t[-1]))
    if not t1 > t0:
        raise NoOverlap(f"trace spans do not overlap (common span [{t0}, {t1}])")

    rate = front.sample_rate_hz
    if np.array_equal(front.t, back.t) and _on_own_grid(front):
        rf, rb = front, back  # already aligned; interpolation would be identity
    else:
        # Guard against float round-off pushing the last grid point past t1.
        n = int(math.floor((t1 - t0) * rate * (1.0 + 1e-12))) + 1
        grid = t0 + np.arange(n) / rate
        rf = _interp_trace(front, grid)
        rb = _interp_trace(back, grid)
    mag_f = rf.magnitude()
    mag_b = rb.magnitude()
    return FusedTrace(
        front=rf,
        back=rb,
        a_total_front=mag_f,
        a_total_back=mag_b,
        a_total_mean=(mag_f + mag_b) / 2.0,
    )


def _interp_trace(trace: SensorTrace, grid: np.ndarray) -> SensorTrace:
    a = np.column_stack([np.interp(grid, trace.t, trace.a[:, k]) for k in range(3)])
    # A grid point is saturated if either neighbouring source sample was.
    right = np.searchsorted(trace.t, grid, side="left")
    right = np.clip(right, 0, len(trace) - 1)
    left = np.clip(right - 1, 0, len(trace) - 1)
    sat = trace.saturated[left] | trace.saturated[right]
    return replace(trace, t=grid, a=a, saturated=sat)
