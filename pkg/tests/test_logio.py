"""Log parsing, log writing and report formatting."""

import io

import numpy as np
import pytest

from forkmon.errors import (
    InvalidValue,
    MalformedHeader,
    NonMonotoneTimestamps,
    UnknownUnit,
)
from forkmon.logio import (
    MACHINE_COLUMNS,
    emit_report,
    format_human,
    format_machine,
    iter_records,
    parse_log,
    write_log,
)
from forkmon.model import (
    FSR,
    GRAVITY,
    EventKind,
    EventReport,
    Frame,
    MountPosition,
    SensorTrace,
    SeverityLabel,
    Zone,
)

HEADER_MS2 = "t_us,node_id,ax,ay,az,unit=ms2"
HEADER_G = "t_us,node_id,ax,ay,az,unit=G"


def log_from(*lines):
    return io.StringIO("\n".join(lines) + "\n")


class TestHeader:
    def test_bad_header(self):
        with pytest.raises(MalformedHeader):
            parse_log(log_from("time,node,ax,ay,az,unit=ms2", "0,front,0,0,9.81"))

    def test_unknown_unit(self):
        with pytest.raises(UnknownUnit):
            parse_log(log_from("t_us,node_id,ax,ay,az,unit=mg", "0,front,0,0,1"))

    def test_empty_file(self):
        with pytest.raises(MalformedHeader, match="empty log"):
            parse_log(io.StringIO(""))

    def test_header_only(self):
        with pytest.raises(InvalidValue, match="no samples"):
            parse_log(log_from(HEADER_MS2))


class TestParse:
    def test_two_nodes_first_appearance_order(self):
        traces = parse_log(
            log_from(
                HEADER_MS2,
                "0,rear,0,0,9.81",
                "0,nose,0,0,9.81",
                "10000,rear,0,0,9.81",
                "10000,nose,0,0,9.81",
            )
        )
        assert [tr.node_id for tr in traces] == ["rear", "nose"]
        assert all(tr.frame is Frame.TILTED for tr in traces)
        np.testing.assert_allclose(traces[0].t, [0.0, 0.01])

    def test_g_unit_scales(self):
        (trace,) = parse_log(log_from(HEADER_G, "0,front,0,0,1", "10000,front,0.5,0,1"))
        assert trace.a[0, 2] == pytest.approx(GRAVITY)
        assert trace.a[1, 0] == pytest.approx(0.5 * GRAVITY)

    def test_time_zero_is_earliest_sample_across_nodes(self):
        traces = parse_log(
            log_from(
                HEADER_MS2,
                "5000,front,0,0,9.81",
                "0,back,0,0,9.81",
                "15000,front,0,0,9.81",
                "10000,back,0,0,9.81",
            )
        )
        by_id = {tr.node_id: tr for tr in traces}
        np.testing.assert_allclose(by_id["front"].t, [0.005, 0.015])
        np.testing.assert_allclose(by_id["back"].t, [0.0, 0.010])

    def test_non_monotone_reports_node_and_line(self):
        with pytest.raises(NonMonotoneTimestamps) as err:
            parse_log(
                log_from(
                    HEADER_MS2,
                    "0,front,0,0,9.81",
                    "10000,front,0,0,9.81",
                    "",
                    "5000,front,0,0,9.81",
                )
            )
        assert err.value.node_id == "front"
        assert err.value.row == 5  # blank line still counts toward file position

    def test_duplicate_timestamp_keeps_first(self):
        (trace,) = parse_log(
            log_from(HEADER_MS2, "0,front,1,0,9.81", "0,front,2,0,9.81", "10000,front,3,0,9.81")
        )
        assert len(trace) == 2
        assert trace.a[0, 0] == 1.0

    def test_out_of_range_clips_and_flags(self):
        (trace,) = parse_log(
            log_from(HEADER_MS2, "0,front,0,0,9.81", f"10000,front,{2 * FSR},0,9.81")
        )
        assert trace.saturated.tolist() == [False, True]
        assert trace.a[1, 0] == pytest.approx(FSR)

    @pytest.mark.parametrize(
        "row, fragment",
        [
            ("10000,front,1,2", "expected 5 fields"),
            ("10000,front,one,2,3", "could not convert"),
            ("10000,front,nan,2,3", "non-finite"),
            ("10000, ,1,2,3", "empty node_id"),
            ("1.5,front,1,2,3", "invalid literal"),
        ],
    )
    def test_bad_rows_carry_location(self, row, fragment):
        with pytest.raises(InvalidValue, match="<log>:3"):
            parse_log(log_from(HEADER_MS2, "0,front,0,0,9.81", row))

    def test_iter_records_converts_units(self):
        recs = list(iter_records([HEADER_G, "0,front,1,0,0"]))
        assert len(recs) == 1
        assert recs[0].a_x == pytest.approx(GRAVITY)
        assert recs[0].t_us == 0


class TestRoundTrip:
    def _trace(self, node_id="front"):
        rng = np.random.default_rng(11)
        t = np.arange(64) / 100.0
        a = rng.normal(0.0, 5.0, (64, 3))
        return SensorTrace(node_id=node_id, t=t, a=a, frame=Frame.TILTED, sample_rate_hz=100.0)

    def test_ms2_round_trip_is_lossless(self):
        front, back = self._trace("front"), self._trace("back")
        buf = io.StringIO()
        write_log(buf, [front, back])
        buf.seek(0)
        parsed = {tr.node_id: tr for tr in parse_log(buf)}
        np.testing.assert_array_equal(parsed["front"].a, front.a)
        np.testing.assert_array_equal(parsed["back"].a, back.a)
        np.testing.assert_allclose(parsed["front"].t, front.t, atol=1e-9)

    def test_g_round_trip_close(self):
        trace = self._trace()
        buf = io.StringIO()
        write_log(buf, [trace], unit="G")
        buf.seek(0)
        (parsed,) = parse_log(buf)
        np.testing.assert_allclose(parsed.a, trace.a, atol=1e-12)

    def test_rows_sorted_by_time(self):
        buf = io.StringIO()
        write_log(buf, [self._trace("b"), self._trace("a")])
        stamps = [int(line.split(",", 1)[0]) for line in buf.getvalue().splitlines()[1:]]
        assert stamps == sorted(stamps)

    def test_rejects_unknown_unit(self):
        with pytest.raises(UnknownUnit):
            write_log(io.StringIO(), [self._trace()], unit="mg")


def _events():
    return [
        EventReport(
            kind=EventKind.COLLISION, t_start=1.0, t_end=1.2, peak=30.0,
            zone=Zone.RIGHT_BACK, diagnostics={"route": "short"},
        ),
        EventReport(
            kind=EventKind.COLLISION, t_start=3.0, t_end=3.2, peak=28.0,
            zone=Zone.RIGHT_BACK,
        ),
        EventReport(
            kind=EventKind.VIBRATION_LONG, t_start=5.0, t_end=7.5, peak=12.0,
            severity_label=SeverityLabel.BT,
        ),
        EventReport(kind=EventKind.HARSH_BRAKING, t_start=9.0, t_end=11.0, peak=8.0),
    ]


class TestFormatting:
    def test_human_groups_repeats(self):
        assert format_human(_events()) == [
            "2x RB collision",
            "long vibration BT",
            "braking",
        ]

    def test_human_empty_says_nothing(self):
        assert format_human([]) == ["Nothing"]

    def test_machine_rows(self):
        rows = format_machine(_events())
        assert len(rows) == 4
        first = rows[0].split("\t")
        assert first[:5] == ["1.000000", "1.200000", "collision", "RB", "30.000000"]
        assert first[5] == '{"route":"short"}'
        assert rows[2].split("\t")[3] == "BT"
        assert rows[3].split("\t")[3] == "-"

    def test_emit_human_with_headers(self):
        buf = io.StringIO()
        emit_report(buf, _events()[:1], fmt="human", header_lines=["config a=1"])
        assert buf.getvalue() == "# config a=1\nRB collision\n"

    def test_emit_machine_column_line(self):
        buf = io.StringIO()
        emit_report(buf, [], fmt="machine")
        assert buf.getvalue() == "# " + "\t".join(MACHINE_COLUMNS) + "\n"

    def test_emit_rejects_unknown_format(self):
        with pytest.raises(InvalidValue):
            emit_report(io.StringIO(), [], fmt="xml")
