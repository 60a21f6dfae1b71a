"""Mounting-misalignment calibration and frame transforms.

Roll and pitch are recovered from the gravity vector while the vehicle is
stationary: with the leveled-frame gravity P_L = [0, 0, g] expressed in the
tilted sensor frame through the 3-2-1 Euler rotation, the measured statics
are

    a_x = -g sin(theta),  a_y = g cos(theta) sin(phi),  a_z = g cos(theta) cos(phi)

so theta = arcsin(a_x / -g) and phi = atan2(a_y, a_z). The two-argument
arctangent keeps phi defined when a_z is near zero. Yaw cannot be observed
at rest; a rough moving-window estimate flags gross installation errors but
is never applied as a rotation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import FrameMismatch, InsufficientMotion, NotStationary, TiltOutOfRange
from .model import Frame, SensorTrace

STATIC_STD_MAX = 0.15  # m/s² per axis; above this the window is not stationary
STATIC_MIN_DURATION = 1.0  # s
YAW_GROSS_LIMIT = math.pi / 4  # quadrant boundary separating install errors
YAW_MIN_PLANAR = 1.0  # m/s² mean planar acceleration needed to estimate yaw

_ARCSIN_TOL = 1e-9  # |a_x/g| may exceed 1 by at most this before rejection


@dataclass(frozen=True)
class CalibrationParams:
    """Estimated mounting angles, radians.

    ``yaw_psi_estimate`` is advisory only (set from motion data, never
    applied); ``yaw_gross_misalignment`` marks a quadrant-level yaw error.
    """

    roll_phi: float
    pitch_theta: float
    yaw_psi_estimate: float | None = None
    yaw_gross_misalignment: bool = False

    def __post_init__(self) -> None:
        if abs(self.roll_phi) >= math.pi / 2 or abs(self.pitch_theta) >= math.pi / 2:
            raise TiltOutOfRange(
                f"roll/pitch of ({math.degrees(self.roll_phi):.1f}, "
                f"{math.degrees(self.pitch_theta):.1f}) deg is a mounting error"
            )


def euler_321(phi: float, theta: float, psi: float) -> np.ndarray:
    """3-2-1 Euler rotation matrix R_TL mapping leveled vectors to tilted.

    Orthonormal with determinant +1 for any finite angles.
    """
    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cth * cpsi, spsi * cth, -sth],
            [sphi * sth * cpsi - cphi * spsi, sphi * sth * spsi + cphi * cpsi, cth * sphi],
            [sth * cphi * cpsi + sphi * spsi, sth * spsi * cphi - cpsi * sphi, cth * cphi],
        ]
    )


def estimate_tilt(
    t: np.ndarray,
    a: np.ndarray,
    *,
    gravity: float = 9.81,
    min_duration: float = STATIC_MIN_DURATION,
    max_std: float = STATIC_STD_MAX,
) -> CalibrationParams:
    """Recover roll and pitch from a static window of tilted-frame samples.

    The window must span at least ``min_duration`` seconds with per-axis
    standard deviation below ``max_std`` (raises NotStationary otherwise).
    Raises TiltOutOfRange when |mean a_x| exceeds g or the recovered angle
    reaches 90 degrees.
    """
    t = np.asarray(t, dtype=float)
    a = np.asarray(a, dtype=float)
    # Tolerance absorbs binary rounding in spans such as 2.33 - 1.33.
    if t.size < 2 or float(t[-1] - t[0]) < min_duration * (1.0 - 1e-9):
        raise NotStationary(f"static window must span at least {min_duration} s")
    stds = a.std(axis=0)
    if np.any(stds >= max_std):
        raise NotStationary(
            "window is not stationary: per-axis std "
            f"({stds[0]:.3f}, {stds[1]:.3f}, {stds[2]:.3f}) m/s², limit {max_std}"
        )
    mean_x, mean_y, mean_z = a.mean(axis=0)
    ratio = mean_x / -gravity
    if abs(ratio) > 1.0 + _ARCSIN_TOL:
        raise TiltOutOfRange(f"|mean a_x| = {abs(mean_x):.2f} exceeds g = {gravity}")
    theta = math.asin(max(-1.0, min(1.0, ratio)))
    phi = math.atan2(mean_y, mean_z)
    return CalibrationParams(roll_phi=phi, pitch_theta=theta)


def level_trace(trace: SensorTrace, params: CalibrationParams) -> SensorTrace:
    """Rotate a tilted trace into the leveled frame via R_TL(phi, theta, 0)^-1."""
    if trace.frame is not Frame.TILTED:
        raise FrameMismatch(f"trace {trace.node_id!r} is already {trace.frame.value}")
    r = euler_321(params.roll_phi, params.pitch_theta, 0.0)
    # P_L = R^T P_T for every sample; as a row operation that is a @ R.
    leveled = trace.a @ r
    return replace(trace, a=leveled, frame=Frame.LEVELED)


def compensate_gravity(trace: SensorTrace, *, gravity: float = 9.81) -> SensorTrace:
    """Remove g from the vertical axis so static rest reads (0, 0, 0)."""
    if trace.frame is not Frame.LEVELED:
        raise FrameMismatch(f"trace {trace.node_id!r} is {trace.frame.value}, expected leveled")
    a = trace.a.copy()
    a[:, 2] -= gravity
    return replace(trace, a=a, frame=Frame.LEVELED_GRAVITY_COMPENSATED)


def estimate_yaw_moving(
    a: np.ndarray,
    base: CalibrationParams,
    *,
    min_planar: float = YAW_MIN_PLANAR,
) -> CalibrationParams:
    """Estimate yaw from a leveled window of straight-line acceleration.

    psi = atan2(mean a_y, mean a_x), folded into (-90°, 90°]: without
    odometry an accelerometer cannot tell acceleration from deceleration,
    so psi and psi ± 180° are the same installation (braking must not read
    as a backwards mount). The estimate is diagnostic only and highly
    noise-sensitive; it is used solely to raise the gross misalignment flag
    when the folded |psi| exceeds 45 degrees (catching installs rotated by
    a quadrant). Raises InsufficientMotion when the mean planar
    acceleration is at most ``min_planar``.
    """
    a = np.asarray(a, dtype=float)
    mean_x = float(a[:, 0].mean())
    mean_y = float(a[:, 1].mean())
    if math.hypot(mean_x, mean_y) <= min_planar:
        raise InsufficientMotion(
            f"mean planar acceleration {math.hypot(mean_x, mean_y):.2f} m/s² "
            f"is too weak for a yaw estimate (need > {min_planar})"
        )
    psi = math.atan2(mean_y, mean_x)
    if psi > math.pi / 2:
        psi -= math.pi
    elif psi <= -math.pi / 2:
        psi += math.pi
    return replace(
        base,
        yaw_psi_estimate=psi,
        yaw_gross_misalignment=abs(psi) > YAW_GROSS_LIMIT,
    )


def _rolling_moments(a: np.ndarray, width: int) -> tuple[np.ndarray, np.ndarray]:
    """Windowed mean and variance of each column (population, ddof=0).

    Cumulative-sum formulation: O(n) regardless of window width, unlike a
    strided-view std which touches n×width elements. On m/s²-scale data the
    E[x²] − E[x]² cancellation costs ~1e−13 absolute, far below the 0.15
    stationarity gate.
    """
    s1 = np.cumsum(np.vstack([np.zeros(a.shape[1]), a]), axis=0)
    s2 = np.cumsum(np.vstack([np.zeros(a.shape[1]), a * a]), axis=0)
    sum1 = s1[width:] - s1[:-width]
    sum2 = s2[width:] - s2[:-width]
    mean = sum1 / width
    var = np.maximum(sum2 / width - mean * mean, 0.0)
    return mean, var


def find_static_window(
    trace: SensorTrace,
    *,
    min_duration: float = STATIC_MIN_DURATION,
    max_std: float = STATIC_STD_MAX,
) -> tuple[int, int] | None:
    """Locate the first window of ``min_duration`` with per-axis std < max_std.

    Returns (start, end) indices into the trace (end exclusive), or None if
    no such window exists.
    """
    n = len(trace)
    width = int(round(min_duration * trace.sample_rate_hz)) + 1
    if n < width:
        return None
    _, var = _rolling_moments(trace.a, width)
    ok = np.all(var < max_std * max_std, axis=1)
    # The std gate does not check time coverage; gappy traces are re-checked.
    spans = trace.t[width - 1 :] - trace.t[: n - width + 1]
    ok &= spans >= min_duration * (1.0 - 1e-9)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None
    start = int(hits[0])
    return start, start + width


def find_moving_window(
    trace: SensorTrace,
    *,
    window_s: float = 2.0,
    min_planar: float = YAW_MIN_PLANAR,
) -> tuple[int, int] | None:
    """Locate the leveled window with the strongest mean planar acceleration.

    The 2 s default is long enough that a brief lateral impact cannot carry
    the window: only sustained longitudinal pushes (braking, acceleration
    runs) qualify. Returns None when no window exceeds ``min_planar`` m/s².
    """
    n = len(trace)
    width = int(round(window_s * trace.sample_rate_hz)) + 1
    if n < width:
        return None
    means, _ = _rolling_moments(trace.a[:, :2], width)
    planar = np.hypot(means[:, 0], means[:, 1])
    best = int(np.argmax(planar))
    if planar[best] <= min_planar:
        return None
    return best, best + width


def calibrate_trace(
    trace: SensorTrace,
    *,
    gravity: float = 9.81,
    min_duration: float = STATIC_MIN_DURATION,
    max_std: float = STATIC_STD_MAX,
) -> CalibrationParams:
    """Estimate tilt from the first static window of a tilted trace.

    Raises NotStationary when the trace contains no static window.
    """
    window = find_static_window(trace, min_duration=min_duration, max_std=max_std)
    if window is None:
        raise NotStationary(f"trace {trace.node_id!r} contains no stationary window")
    i0, i1 = window
    return estimate_tilt(
        trace.t[i0:i1],
        trace.a[i0:i1],
        gravity=gravity,
        min_duration=min_duration,
        max_std=max_std,
    )
