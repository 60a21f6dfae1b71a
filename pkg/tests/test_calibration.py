"""Tilt estimation, rotation properties and frame transforms."""

import math

import numpy as np
import pytest

from forkmon.calibration import (
    CalibrationParams,
    calibrate_trace,
    compensate_gravity,
    estimate_tilt,
    estimate_yaw_moving,
    euler_321,
    find_moving_window,
    find_static_window,
    level_trace,
)
from forkmon.errors import (
    FrameMismatch,
    InsufficientMotion,
    NotStationary,
    TiltOutOfRange,
)
from forkmon.model import Frame, SensorTrace

G = 9.81


def static_gravity(phi_deg, theta_deg, n=101, rate=100.0, gravity=G):
    """Tilted-frame samples of a vehicle at rest with the given mounting."""
    r = euler_321(math.radians(phi_deg), math.radians(theta_deg), 0.0)
    leveled = np.tile([0.0, 0.0, gravity], (n, 1))
    return np.arange(n) / rate, leveled @ r.T


class TestEuler321:
    @pytest.mark.parametrize("seed", range(5))
    def test_orthonormal_and_proper(self, seed):
        rng = np.random.default_rng(seed)
        for phi, theta, psi in rng.uniform(-np.pi, np.pi, (200, 3)):
            r = euler_321(phi, theta, psi)
            np.testing.assert_allclose(r.T @ r, np.eye(3), atol=1e-13)
            assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-13)

    def test_identity_at_zero(self):
        np.testing.assert_allclose(euler_321(0.0, 0.0, 0.0), np.eye(3), atol=0.0)

    def test_statics_match_closed_form(self):
        # gravity seen by the tilted sensor: the textbook roll/pitch statics
        phi, theta = math.radians(10.0), math.radians(20.0)
        seen = euler_321(phi, theta, 0.0) @ np.array([0.0, 0.0, G])
        np.testing.assert_allclose(
            seen,
            [
                -G * math.sin(theta),
                G * math.cos(theta) * math.sin(phi),
                G * math.cos(theta) * math.cos(phi),
            ],
            rtol=1e-15,
        )


class TestEstimateTilt:
    def test_frozen_vector_recovers_angles(self):
        # static reading for roll 10°, pitch 20° (value pinned from the
        # closed-form statics above)
        a = np.tile(
            [-3.3552176060248105, 1.6007556885437066, 9.078336634087552], (101, 1)
        )
        t = np.arange(101) / 100.0
        params = estimate_tilt(t, a)
        assert math.degrees(params.roll_phi) == pytest.approx(10.0, abs=1e-9)
        assert math.degrees(params.pitch_theta) == pytest.approx(20.0, abs=1e-9)

    @pytest.mark.parametrize(
        "phi_deg, theta_deg",
        [(0.0, 0.0), (30.0, 0.0), (0.0, -30.0), (17.5, -24.0), (-45.0, 10.0)],
    )
    def test_round_trip_noise_free(self, phi_deg, theta_deg):
        t, a = static_gravity(phi_deg, theta_deg)
        params = estimate_tilt(t, a)
        assert math.degrees(params.roll_phi) == pytest.approx(phi_deg, abs=1e-6)
        assert math.degrees(params.pitch_theta) == pytest.approx(theta_deg, abs=1e-6)

    def test_round_trip_under_noise(self):
        rng = np.random.default_rng(42)
        t, a = static_gravity(12.0, -8.0, n=101)
        a = a + rng.normal(0.0, 0.05, a.shape)
        params = estimate_tilt(t, a)
        assert math.degrees(params.roll_phi) == pytest.approx(12.0, abs=0.5)
        assert math.degrees(params.pitch_theta) == pytest.approx(-8.0, abs=0.5)

    def test_short_window_rejected(self):
        t, a = static_gravity(5.0, 5.0, n=50)  # 0.49 s < 1 s
        with pytest.raises(NotStationary):
            estimate_tilt(t, a)

    def test_window_span_tolerates_rounding(self):
        # spans like 1.13 - 0.13 land 1 ulp below 1.0; must still be accepted
        t, a = static_gravity(5.0, 5.0, n=101)
        assert 0.0 < 1.0 - float((t + 0.13)[-1] - (t + 0.13)[0]) < 1e-12
        estimate_tilt(t + 0.13, a)

    def test_shaky_window_rejected(self):
        rng = np.random.default_rng(3)
        t, a = static_gravity(0.0, 0.0)
        a = a + rng.normal(0.0, 0.5, a.shape)
        with pytest.raises(NotStationary, match="not stationary"):
            estimate_tilt(t, a)

    def test_excess_longitudinal_gravity_rejected(self):
        t = np.arange(101) / 100.0
        a = np.tile([-1.5 * G, 0.0, 0.0], (101, 1))
        with pytest.raises(TiltOutOfRange):
            estimate_tilt(t, a)

    def test_ninety_degree_mount_rejected(self):
        # sideways mount: gravity entirely on y
        t = np.arange(101) / 100.0
        a = np.tile([0.0, G, 0.0], (101, 1))
        with pytest.raises(TiltOutOfRange):
            estimate_tilt(t, a)


class TestCalibrationParams:
    def test_rejects_quarter_turn(self):
        with pytest.raises(TiltOutOfRange):
            CalibrationParams(roll_phi=math.pi / 2, pitch_theta=0.0)

    def test_accepts_interior(self):
        p = CalibrationParams(roll_phi=0.5, pitch_theta=-0.5)
        assert p.yaw_psi_estimate is None
        assert p.yaw_gross_misalignment is False


class TestLevelAndCompensate:
    def test_leveling_restores_gravity_axis(self):
        t, a = static_gravity(25.0, -15.0, n=201)
        trace = SensorTrace(node_id="n", t=t, a=a, frame=Frame.TILTED)
        params = estimate_tilt(t, a)
        leveled = level_trace(trace, params)
        assert leveled.frame is Frame.LEVELED
        np.testing.assert_allclose(leveled.a, np.tile([0.0, 0.0, G], (201, 1)), atol=1e-9)
        lgc = compensate_gravity(leveled)
        assert lgc.frame is Frame.LEVELED_GRAVITY_COMPENSATED
        np.testing.assert_allclose(lgc.a, 0.0, atol=1e-9)

    def test_level_requires_tilted(self):
        t, a = static_gravity(0.0, 0.0)
        trace = SensorTrace(node_id="n", t=t, a=a, frame=Frame.LEVELED)
        with pytest.raises(FrameMismatch):
            level_trace(trace, CalibrationParams(0.0, 0.0))

    def test_compensate_requires_leveled(self):
        t, a = static_gravity(0.0, 0.0)
        trace = SensorTrace(node_id="n", t=t, a=a, frame=Frame.TILTED)
        with pytest.raises(FrameMismatch):
            compensate_gravity(trace)

    def test_dynamic_signal_survives_leveling(self):
        """A known leveled-frame signal is recovered exactly after tilt removal."""
        rng = np.random.default_rng(9)
        n, rate = 500, 100.0
        t = np.arange(n) / rate
        truth = rng.normal(0.0, 3.0, (n, 3))
        truth[:, 2] += G
        r = euler_321(math.radians(14.0), math.radians(-21.0), 0.0)
        tilted = SensorTrace(node_id="n", t=t, a=truth @ r.T, frame=Frame.TILTED)
        params = CalibrationParams(math.radians(14.0), math.radians(-21.0))
        np.testing.assert_allclose(level_trace(tilted, params).a, truth, atol=1e-12)


class TestYawEstimate:
    def _params(self):
        return CalibrationParams(0.0, 0.0)

    def test_straight_push_reads_zero(self):
        a = np.tile([3.0, 0.0, 0.0], (100, 1))
        p = estimate_yaw_moving(a, self._params())
        assert p.yaw_psi_estimate == pytest.approx(0.0)
        assert not p.yaw_gross_misalignment

    def test_braking_folds_to_zero(self):
        # deceleration points backwards; a naive atan2 would claim a 180° mount
        a = np.tile([-3.0, 0.0, 0.0], (100, 1))
        p = estimate_yaw_moving(a, self._params())
        assert p.yaw_psi_estimate == pytest.approx(0.0)
        assert not p.yaw_gross_misalignment

    @pytest.mark.parametrize("yaw_deg, flagged", [(10.0, False), (44.0, False), (60.0, True), (89.0, True)])
    def test_flag_threshold(self, yaw_deg, flagged):
        yaw = math.radians(yaw_deg)
        a = np.tile([3.0 * math.cos(yaw), 3.0 * math.sin(yaw), 0.0], (100, 1))
        p = estimate_yaw_moving(a, self._params())
        assert p.yaw_psi_estimate == pytest.approx(yaw)
        assert p.yaw_gross_misalignment is flagged

    def test_fold_is_half_open(self):
        # exactly backwards (psi = 180°) folds to 0, not to the -180 branch
        a = np.tile([-3.0, -1e-300, 0.0], (10, 1))
        p = estimate_yaw_moving(a, self._params())
        assert abs(p.yaw_psi_estimate) < 1e-9

    def test_weak_motion_rejected(self):
        a = np.tile([0.3, 0.1, 0.0], (100, 1))
        with pytest.raises(InsufficientMotion):
            estimate_yaw_moving(a, self._params())

    def test_preserves_tilt_fields(self):
        base = CalibrationParams(0.2, -0.1)
        a = np.tile([3.0, 1.0, 0.0], (100, 1))
        p = estimate_yaw_moving(a, base)
        assert p.roll_phi == base.roll_phi
        assert p.pitch_theta == base.pitch_theta


class TestWindowFinders:
    def _trace(self, a, rate=100.0):
        t = np.arange(a.shape[0]) / rate
        return SensorTrace(node_id="n", t=t, a=a, frame=Frame.TILTED, sample_rate_hz=rate)

    def test_finds_first_quiet_stretch(self):
        rng = np.random.default_rng(0)
        a = rng.normal(0.0, 2.0, (400, 3))  # noisy first 4 s
        a[150:300] = [0.0, 0.0, G]  # quiet 1.5 s in the middle
        a[150:300] += rng.normal(0.0, 0.01, (150, 3))
        window = find_static_window(self._trace(a))
        assert window is not None
        i0, i1 = window
        assert 150 <= i0 and i1 <= 300
        assert i1 - i0 == 101

    def test_none_when_never_still(self):
        rng = np.random.default_rng(1)
        a = rng.normal(0.0, 2.0, (400, 3))
        assert find_static_window(self._trace(a)) is None

    def test_none_when_too_short(self):
        a = np.tile([0.0, 0.0, G], (50, 1))
        assert find_static_window(self._trace(a)) is None

    def test_gappy_trace_checks_time_span(self):
        # quiet samples whose timestamps cover < 1 s despite 101 samples
        t = np.arange(101) / 100.0
        t = np.concatenate([t[:50], t[50:] - 0.004])  # compress the tail
        t = np.sort(t)
        a = np.tile([0.0, 0.0, G], (101, 1))
        trace = SensorTrace(node_id="n", t=t, a=a, frame=Frame.TILTED, sample_rate_hz=100.0)
        assert find_static_window(trace) is None

    def test_moving_window_picks_strongest_push(self):
        a = np.zeros((1000, 3))
        a[300:550, 0] = 2.5  # sustained 2.5 s longitudinal push
        window = find_moving_window(self._trace(a))
        assert window is not None
        i0, i1 = window
        assert i1 - i0 == 201
        assert 250 <= i0 <= 350

    def test_brief_impact_cannot_carry_moving_window(self):
        # a collision rings — the oscillation nets out over the 2 s window,
        # so even a violent hit leaves no sustained planar mean
        a = np.zeros((1000, 3))
        t_hit = np.arange(15) / 100.0
        a[500:515, 1] = 40.0 * np.exp(-t_hit / 0.05) * np.sin(2 * np.pi * 20.0 * t_hit)
        assert find_moving_window(self._trace(a)) is None


class TestCalibrateTrace:
    def test_recovers_from_realistic_trace(self):
        rng = np.random.default_rng(5)
        t, statics = static_gravity(10.0, 20.0, n=700, rate=100.0)
        a = statics + rng.normal(0.0, 0.03, statics.shape)
        a[400:] += rng.normal(0.0, 3.0, (300, 3))  # driving after the still start
        trace = SensorTrace(node_id="n", t=t, a=a, frame=Frame.TILTED)
        params = calibrate_trace(trace)
        assert math.degrees(params.roll_phi) == pytest.approx(10.0, abs=0.3)
        assert math.degrees(params.pitch_theta) == pytest.approx(20.0, abs=0.3)

    def test_no_static_window_raises(self):
        rng = np.random.default_rng(6)
        t = np.arange(300) / 100.0
        a = rng.normal(0.0, 2.0, (300, 3))
        trace = SensorTrace(node_id="n", t=t, a=a, frame=Frame.TILTED)
        with pytest.raises(NotStationary):
            calibrate_trace(trace)
