from fractions import Fraction

import pytest

from flowtune.errors import OverlappingPortSets, UnsortedTrace
from flowtune.model import ClassLabel, FlowKey, US_PER_SECOND
from flowtune.traffic import (
    CbrSpec,
    ClassProfile,
    DEFAULT_IOT_PROFILES,
    TraceRow,
    VideoSpec,
    gen_cbr,
    gen_synthetic_iot_trace,
    gen_video,
    merge_streams,
    replay_trace,
)


KEY = FlowKey(src_ip=0x0A000001, dst_ip=0x0A000003, src_port=5000, dst_port=6000, protocol=17)


class TestCbr:
    def test_2mbps_1250_byte_packets(self):
        # Arithmetic oracle: 2e6 bps / (1250*8 bits) = 200 packets per second,
        # inter-departure 5000 us.
        assert Fraction(2_000_000, 1250 * 8) == 200
        spec = CbrSpec(key=KEY, rate_bps=2_000_000, packet_size_bytes=1250,
                       start=0, duration=US_PER_SECOND)
        packets = gen_cbr(spec)
        assert len(packets) == 200
        gaps = {b.created_at - a.created_at for a, b in zip(packets, packets[1:])}
        assert gaps == {5000}

    def test_zero_duration_empty(self):
        spec = CbrSpec(key=KEY, rate_bps=1_000_000, packet_size_bytes=100, start=0, duration=0)
        assert gen_cbr(spec) == []

    def test_start_offset_10s(self):
        spec = CbrSpec(key=KEY, rate_bps=2_000_000, packet_size_bytes=1250,
                       start=10 * US_PER_SECOND, duration=US_PER_SECOND)
        assert gen_cbr(spec)[0].created_at == 10_000_000

    def test_long_run_rate_within_one_percent(self):
        spec = CbrSpec(key=KEY, rate_bps=3_333_333, packet_size_bytes=733,
                       start=0, duration=US_PER_SECOND)
        packets = gen_cbr(spec)
        window = packets[-1].created_at - packets[0].created_at
        measured = (len(packets) - 1) * 733 * 8 * US_PER_SECOND / window
        assert abs(measured - spec.rate_bps) / spec.rate_bps < 0.01


class TestVideo:
    def test_300_frames_in_10s(self):
        spec = VideoSpec(key=KEY, fps=30, packets_per_frame=4, packet_size_bytes=1000,
                         start=0, duration=10 * US_PER_SECOND)
        packets = gen_video(spec)
        assert len({p.frame_seq for p in packets}) == 300

    def test_frame_grouping(self):
        spec = VideoSpec(key=KEY, fps=30, packets_per_frame=4, packet_size_bytes=1000,
                         start=0, duration=US_PER_SECOND)
        packets = [p for p in gen_video(spec) if p.frame_seq == 7]
        assert len(packets) == 4
        assert {p.frame_seq for p in packets} == {7}

    def test_frame_times_exact_rational_no_drift(self):
        # Oracle: frame k starts at floor(k * 1e6 / 30) exactly.
        spec = VideoSpec(key=KEY, fps=30, packets_per_frame=1, packet_size_bytes=1000,
                         start=0, duration=10 * US_PER_SECOND)
        packets = gen_video(spec)
        for p in packets:
            exact = Fraction(p.frame_seq * US_PER_SECOND, 30)
            assert p.created_at == exact.numerator // exact.denominator
        # Cumulative drift below one frame period over 300 frames.
        drift = abs(packets[-1].created_at - float(Fraction(299 * US_PER_SECOND, 30)))
        assert drift < US_PER_SECOND / 30


def row(ts, size=1250, dst_port=80, label=None):
    return TraceRow(ingress_port=1, flow_interval_time=10, enq_qdepth=0, deq_qdepth=1,
                    deq_timedelta=5, protocol=17, src_port=1234, dst_port=dst_port,
                    src_ip=1, dst_ip=2, timestamp_us=ts, size_bytes=size, label=label)


class TestReplay:
    def test_under_capacity_preserves_timestamps(self):
        rows = [row(0), row(100_000), row(200_000)]
        packets = replay_trace(rows, 2_000_000)
        assert [p.created_at for p in packets] == [0, 100_000, 200_000]

    def test_back_to_back_paced_by_serialization(self):
        rows = [row(0), row(1)]
        packets = replay_trace(rows, 2_000_000)
        assert packets[1].created_at - packets[0].created_at >= 5000

    def test_unsorted_raises(self):
        with pytest.raises(UnsortedTrace):
            replay_trace([row(100), row(50)], 2_000_000)


class TestSyntheticTrace:
    def test_counts_per_class(self):
        rows = gen_synthetic_iot_trace(DEFAULT_IOT_PROFILES, 1000, seed=42)
        assert len(rows) == 6000
        for label in ClassLabel:
            assert sum(1 for r in rows if r.label == label) == 1000

    def test_determinism(self):
        a = gen_synthetic_iot_trace(DEFAULT_IOT_PROFILES, 200, seed=42)
        b = gen_synthetic_iot_trace(DEFAULT_IOT_PROFILES, 200, seed=42)
        assert a == b

    def test_different_seed_differs(self):
        a = gen_synthetic_iot_trace(DEFAULT_IOT_PROFILES, 200, seed=1)
        b = gen_synthetic_iot_trace(DEFAULT_IOT_PROFILES, 200, seed=2)
        assert a != b

    def test_overlapping_port_sets_rejected(self):
        clashing = list(DEFAULT_IOT_PROFILES)
        clashing[1] = ClassProfile(
            ClassLabel.APPLIANCES, (9522,), 6, 0x0A010200, 0x0A000001,
            25_000.0, (80, 400), (300, 3_000), (0, 12),
        )
        with pytest.raises(OverlappingPortSets):
            gen_synthetic_iot_trace(clashing, 10, seed=0)

    def test_rows_sorted_by_timestamp(self):
        rows = gen_synthetic_iot_trace(DEFAULT_IOT_PROFILES, 300, seed=3)
        times = [r.timestamp_us for r in rows]
        assert times == sorted(times)


class TestMerge:
    def test_global_sort_with_stable_tiebreak(self):
        a = gen_cbr(CbrSpec(key=KEY, rate_bps=1_000_000, packet_size_bytes=125,
                            start=0, duration=10_000))
        b_key = FlowKey(src_ip=9, dst_ip=8, src_port=7, dst_port=6, protocol=17)
        b = gen_cbr(CbrSpec(key=b_key, rate_bps=1_000_000, packet_size_bytes=125,
                            start=0, duration=10_000))
        merged = merge_streams(a, b)
        assert [p.packet_seq for p in merged] == list(range(len(merged)))
        times = [p.created_at for p in merged]
        assert times == sorted(times)
        # Equal timestamps: source 0 precedes source 1.
        for first, second in zip(merged, merged[1:]):
            if first.created_at == second.created_at:
                assert first.key == KEY and second.key == b_key

    def test_generators_are_pure(self):
        spec = VideoSpec(key=KEY, fps=24, packets_per_frame=3, packet_size_bytes=900,
                         start=0, duration=US_PER_SECOND)
        assert gen_video(spec) == gen_video(spec)
