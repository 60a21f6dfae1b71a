"""Synthetic trace generator: determinism, construction, ground truth."""

import numpy as np
import pytest

from forkmon.config import AnalysisConfig
from forkmon.errors import InvalidValue, OverlappingSpecs
from forkmon.model import EventKind, Frame, Zone
from forkmon.synth import (
    FAR_NODE_GAIN,
    BrakingIntensity,
    BumpSpeed,
    ScenarioKind,
    ScenarioSpec,
    Severity,
    generate,
)

CFG = AnalysisConfig()


def collision_spec(zone=Zone.RIGHT_BACK, severity=Severity.HARD, onset=4.0, seed=7):
    return ScenarioSpec(
        kind=ScenarioKind.COLLISION, t_onset=onset, duration=0.12,
        rng_seed=seed, zone=zone, severity=severity,
    )


class TestSpecValidation:
    def test_collision_needs_zone_and_severity(self):
        with pytest.raises(InvalidValue):
            ScenarioSpec(kind=ScenarioKind.COLLISION, t_onset=0.0, duration=0.1, rng_seed=1)

    def test_bumpy_needs_speed(self):
        with pytest.raises(InvalidValue):
            ScenarioSpec(kind=ScenarioKind.BUMPY_DRIVING, t_onset=0.0, duration=0.3, rng_seed=1)

    def test_braking_needs_intensity(self):
        with pytest.raises(InvalidValue):
            ScenarioSpec(kind=ScenarioKind.BRAKING, t_onset=0.0, duration=2.0, rng_seed=1)

    def test_rejects_negative_onset(self):
        with pytest.raises(InvalidValue):
            ScenarioSpec(kind=ScenarioKind.IDLE, t_onset=-1.0, duration=1.0, rng_seed=1)

    def test_t_end(self):
        spec = collision_spec(onset=3.0)
        assert spec.t_end == pytest.approx(3.12)


class TestGenerate:
    def test_deterministic(self):
        specs = [collision_spec()]
        f1, b1, _ = generate(specs, CFG, seed=3)
        f2, b2, _ = generate(specs, CFG, seed=3)
        np.testing.assert_array_equal(f1.a, f2.a)
        np.testing.assert_array_equal(b1.a, b2.a)
        np.testing.assert_array_equal(f1.t, f2.t)

    def test_seed_changes_noise(self):
        specs = [collision_spec()]
        f1, _, _ = generate(specs, CFG, seed=3)
        f2, _, _ = generate(specs, CFG, seed=4)
        assert not np.array_equal(f1.a, f2.a)

    def test_overlapping_specs_rejected(self):
        specs = [collision_spec(onset=4.0), collision_spec(onset=4.05, seed=8)]
        with pytest.raises(OverlappingSpecs):
            generate(specs, CFG)

    def test_short_total_duration_rejected(self):
        with pytest.raises(InvalidValue, match="cover"):
            generate([collision_spec(onset=20.0)], CFG, total_duration=10.0)

    def test_spec_flush_with_end_is_tolerated(self):
        # rounding can push the waveform window one sample past the grid
        spec = ScenarioSpec(
            kind=ScenarioKind.COLLISION, t_onset=0.995, duration=9.005,
            rng_seed=1, zone=Zone.RIGHT_BACK, severity=Severity.HARD,
        )
        front, _, _ = generate([spec], CFG, total_duration=10.0)
        assert len(front) == 1001

    def test_traces_are_tilted_frame_with_gravity(self):
        front, back, _ = generate([], CFG, total_duration=12.0, noise_sigma=0.01)
        assert front.frame is Frame.TILTED
        assert back.frame is Frame.TILTED
        assert front.a[:, 2].mean() == pytest.approx(CFG.gravity, abs=0.01)

    def test_idle_trace_is_quiet(self):
        front, back, _ = generate([], CFG, total_duration=30.0)
        # gravity-removed magnitude stays well under the release threshold
        resid = front.a - [0.0, 0.0, CFG.gravity]
        assert np.linalg.norm(resid, axis=1).max() < 1.0

    def test_default_duration_covers_specs(self):
        front, _, _ = generate([collision_spec(onset=25.0)], CFG)
        assert front.t[-1] >= 27.0
        front, _, _ = generate([], CFG)
        assert front.t[-1] == pytest.approx(10.0)

    def test_tilt_rotates_gravity(self):
        front, _, _ = generate([], CFG, total_duration=12.0,
                               roll_deg=0.0, pitch_deg=30.0, noise_sigma=0.01)
        # pitched mount sees gravity partly on x: a_x = -g sin(30°)
        assert front.a[:, 0].mean() == pytest.approx(-CFG.gravity / 2.0, abs=0.01)


class TestCollisionConstruction:
    def _clean_pair(self, zone, severity=Severity.HARD):
        front, back, truth = generate(
            [collision_spec(zone=zone, severity=severity)],
            CFG, seed=0, noise_sigma=1e-9,
        )
        return front, back, truth

    @pytest.mark.parametrize("zone", list(Zone))
    def test_near_node_carries_the_ring(self, zone):
        front, back, _ = self._clean_pair(zone)
        i0, i1 = 400, 413  # samples inside the 0.12 s event at 100 Hz
        peak_front = np.abs(front.a[i0:i1, 1]).max()
        peak_back = np.abs(back.a[i0:i1, 1]).max()
        if zone.is_front:
            assert peak_front > peak_back / FAR_NODE_GAIN * 0.9
        else:
            assert peak_back > peak_front / FAR_NODE_GAIN * 0.9

    @pytest.mark.parametrize("zone", list(Zone))
    def test_lateral_sign_encodes_side(self, zone):
        front, back, _ = self._clean_pair(zone)
        node = front if zone.is_front else back
        window = node.a[400:413, 1]
        peak_signed = window[np.argmax(np.abs(window))]
        # right-side impacts push the truck left: positive a_y first lobe
        assert (peak_signed > 0) == zone.is_right

    def test_lateral_axis_dominates_vertical(self):
        front, back, _ = self._clean_pair(Zone.RIGHT_BACK)
        seg = back.a[400:413]
        assert np.abs(seg[:, 1]).max() > np.abs(seg[:, 2] - CFG.gravity).max()

    def test_hard_collision_meets_mean_peak_target(self):
        front, back, truth = self._clean_pair(Zone.RIGHT_BACK)
        resid_f = front.a - [0.0, 0.0, CFG.gravity]
        resid_b = back.a - [0.0, 0.0, CFG.gravity]
        mean_mag = 0.5 * (np.linalg.norm(resid_f, axis=1) + np.linalg.norm(resid_b, axis=1))
        assert 25.0 <= mean_mag.max() <= 50.0


class TestBrakingConstruction:
    def test_braking_is_one_sided_deceleration(self):
        spec = ScenarioSpec(
            kind=ScenarioKind.BRAKING, t_onset=4.0, duration=2.0,
            rng_seed=5, intensity=BrakingIntensity.HARD,
        )
        front, _, _ = generate([spec], CFG, noise_sigma=1e-9)
        ax = front.a[400:601, 0]
        assert ax.min() < -6.0  # plateau reaches the hard target
        assert (ax <= 1e-6).all()  # never pushes forward
        net = np.trapezoid(ax, front.t[400:601])
        total = np.trapezoid(np.abs(ax), front.t[400:601])
        assert abs(net) / total > 0.9  # strongly one-sided

    def test_sudden_start_mirrors_sign(self):
        spec = ScenarioSpec(
            kind=ScenarioKind.SUDDEN_START, t_onset=4.0, duration=2.0, rng_seed=5,
        )
        front, _, _ = generate([spec], CFG, noise_sigma=1e-9)
        assert front.a[400:601, 0].max() > 6.0


class TestGroundTruth:
    def test_hard_collision_required(self):
        _, _, truth = generate([collision_spec(zone=Zone.LEFT_FRONT)], CFG)
        (entry,) = truth
        assert EventKind.COLLISION in entry.required
        assert entry.expected_zone is Zone.LEFT_FRONT
        assert entry.onset_to_peak >= 0.0

    def test_very_soft_collision_forbidden(self):
        _, _, truth = generate(
            [collision_spec(severity=Severity.VERY_SOFT)], CFG
        )
        (entry,) = truth
        assert entry.required == frozenset()
        assert EventKind.COLLISION in entry.forbidden

    def test_soft_braking_forbids_severe(self):
        spec = ScenarioSpec(
            kind=ScenarioKind.BRAKING, t_onset=4.0, duration=2.0,
            rng_seed=5, intensity=BrakingIntensity.SOFT,
        )
        _, _, truth = generate([spec], CFG)
        (entry,) = truth
        assert entry.required == frozenset()
        assert EventKind.COLLISION in entry.forbidden
        assert EventKind.HARSH_BRAKING in entry.forbidden

    def test_fast_bumps_expect_severe_label(self):
        spec = ScenarioSpec(
            kind=ScenarioKind.BUMPY_DRIVING, t_onset=4.0, duration=0.4,
            rng_seed=5, speed=BumpSpeed.FAST,
        )
        _, _, truth = generate([spec], CFG)
        (entry,) = truth
        assert entry.required == frozenset({EventKind.VIBRATION_SHORT, EventKind.VIBRATION_LONG})
        assert entry.expected_label is not None
        assert entry.expected_label.value == "AT"

    def test_entry_count_matches_specs(self):
        specs = [
            collision_spec(onset=4.0),
            ScenarioSpec(kind=ScenarioKind.LOAD_PICKUP, t_onset=8.0, duration=0.5, rng_seed=2),
            ScenarioSpec(kind=ScenarioKind.IDLE, t_onset=10.0, duration=2.0, rng_seed=3),
        ]
        _, _, truth = generate(specs, CFG)
        assert len(truth) == 3
