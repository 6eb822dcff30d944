"""Deterministic packet sources.

Constant-bit-rate UDP, framed video-like streams, trace replay paced to a
link rate, and a seeded synthetic IoT trace generator with ground-truth
labels (stand-in for a real device capture).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import OverlappingPortSets, UnsortedTrace, ValueOutOfRange
from .model import ClassLabel, FlowKey, Packet, SimTime, US_PER_SECOND, check_width
from .switch import serialization_delay_us


@dataclass(frozen=True)
class CbrSpec:
    """Constant-bit-rate source: fixed-size packets at a fixed rate."""

    key: FlowKey
    rate_bps: int
    packet_size_bytes: int
    start: SimTime
    duration: SimTime
    ingress_port: int = 1

    def __post_init__(self) -> None:
        if self.rate_bps <= 0:
            raise ValueOutOfRange("rate_bps must be > 0")
        if self.packet_size_bytes < 1:
            raise ValueOutOfRange("packet_size_bytes must be >= 1")


@dataclass(frozen=True)
class VideoSpec:
    """Framed source: every 1/fps seconds a burst of packets sharing a frame_seq."""

    key: FlowKey
    fps: int
    packets_per_frame: int
    packet_size_bytes: int
    start: SimTime
    duration: SimTime
    ingress_port: int = 1

    def __post_init__(self) -> None:
        if self.fps < 1:
            raise ValueOutOfRange("fps must be >= 1")
        if self.packets_per_frame < 1:
            raise ValueOutOfRange("packets_per_frame must be >= 1")


@dataclass(frozen=True)
class TraceRow:
    """One trace/dataset row: the ten telemetry features plus emission
    timestamp, packet size, and an optional ground-truth label."""

    ingress_port: int
    flow_interval_time: int
    enq_qdepth: int
    deq_qdepth: int
    deq_timedelta: int
    protocol: int
    src_port: int
    dst_port: int
    src_ip: int
    dst_ip: int
    timestamp_us: int
    size_bytes: int
    label: Optional[ClassLabel] = None

    def __post_init__(self) -> None:
        check_width("ingress_port", self.ingress_port, 9)
        check_width("flow_interval_time", self.flow_interval_time, 48)
        check_width("enq_qdepth", self.enq_qdepth, 19)
        check_width("deq_qdepth", self.deq_qdepth, 19)
        check_width("deq_timedelta", self.deq_timedelta, 32)
        check_width("protocol", self.protocol, 8)
        check_width("src_port", self.src_port, 16)
        check_width("dst_port", self.dst_port, 16)
        check_width("src_ip", self.src_ip, 32)
        check_width("dst_ip", self.dst_ip, 32)

    def flow_key(self) -> FlowKey:
        return FlowKey(self.src_ip, self.dst_ip, self.src_port, self.dst_port, self.protocol)


def gen_cbr(spec: CbrSpec) -> List[Packet]:
    """Fixed inter-departure packets over [start, start+duration).

    Emission time of packet i is start + floor(i * bits * 1e6 / rate), which
    keeps the long-run rate exact with no cumulative drift.
    """
    bits = spec.packet_size_bytes * 8
    packets = []
    i = 0
    while True:
        t = spec.start + (i * bits * US_PER_SECOND) // spec.rate_bps
        if t >= spec.start + spec.duration:
            break
        packets.append(
            Packet(
                key=spec.key,
                size_bytes=spec.packet_size_bytes,
                created_at=t,
                ingress_port=spec.ingress_port,
                packet_seq=i,
            )
        )
        i += 1
    return packets


def gen_video(spec: VideoSpec) -> List[Packet]:
    """Framed stream: frame k starts at start + floor(k*1e6/fps); its
    packets_per_frame packets are emitted back-to-back at that instant."""
    packets = []
    seq = 0
    k = 0
    while True:
        t = spec.start + (k * US_PER_SECOND) // spec.fps
        if t >= spec.start + spec.duration:
            break
        for _ in range(spec.packets_per_frame):
            packets.append(
                Packet(
                    key=spec.key,
                    size_bytes=spec.packet_size_bytes,
                    created_at=t,
                    ingress_port=spec.ingress_port,
                    frame_seq=k,
                    packet_seq=seq,
                )
            )
            seq += 1
        k += 1
    return packets


def replay_trace(rows: Sequence[TraceRow], link_rate_bps: int, ingress_port: int = 1) -> List[Packet]:
    """Turn trace rows into a packet stream paced to the given link rate.

    Row order is preserved; each packet departs at
    max(row timestamp, previous departure + previous serialization time),
    so the offered load never exceeds link_rate_bps.
    """
    packets: List[Packet] = []
    prev_ts = None
    depart = 0
    prev_size = 0
    for i, row in enumerate(rows):
        if prev_ts is not None and row.timestamp_us < prev_ts:
            raise UnsortedTrace(f"row {i} timestamp {row.timestamp_us} < previous {prev_ts}")
        prev_ts = row.timestamp_us
        if packets:
            depart = max(row.timestamp_us, depart + serialization_delay_us(prev_size, link_rate_bps))
        else:
            depart = row.timestamp_us
        prev_size = row.size_bytes
        packets.append(
            Packet(
                key=row.flow_key(),
                size_bytes=row.size_bytes,
                created_at=depart,
                ingress_port=ingress_port,
                packet_seq=i,
            )
        )
    return packets


def merge_streams(*streams: Sequence[Packet]) -> List[Packet]:
    """Merge per-source streams into one globally timestamp-sorted stream.

    Tie-break is (source index, per-source order); packet_seq is reassigned
    to the global emission order.
    """
    tagged = [
        (pkt.created_at, src_idx, local_idx, pkt)
        for src_idx, stream in enumerate(streams)
        for local_idx, pkt in enumerate(stream)
    ]
    tagged.sort(key=lambda item: item[:3])
    return [replace(pkt, packet_seq=seq) for seq, (_, _, _, pkt) in enumerate(tagged)]


@dataclass(frozen=True)
class ClassProfile:
    """Feature distribution for one synthetic IoT class.

    Port sets must be pairwise disjoint across profiles; everything else may
    overlap to make classification harder.
    """

    label: ClassLabel
    dst_ports: Tuple[int, ...]
    protocol: int
    src_ip_base: int
    dst_ip: int
    mean_interarrival_us: float
    size_range: Tuple[int, int]
    interval_time_range: Tuple[int, int]
    qdepth_range: Tuple[int, int]
    ingress_port: int = 2


DEFAULT_IOT_PROFILES: Tuple[ClassProfile, ...] = (
    ClassProfile(ClassLabel.ENERGY, (9522, 10001), 17, 0x0A010100, 0x0A000001,
                 40_000.0, (60, 140), (200, 2_000), (0, 8)),
    ClassProfile(ClassLabel.APPLIANCES, (8883, 8886), 6, 0x0A010200, 0x0A000001,
                 25_000.0, (80, 400), (300, 3_000), (0, 12)),
    ClassProfile(ClassLabel.HUBS, (5683, 1900), 17, 0x0A010300, 0x0A000001,
                 15_000.0, (100, 600), (150, 2_500), (0, 16)),
    ClassProfile(ClassLabel.HEALTH_MONITORS, (6666, 8008), 6, 0x0A010400, 0x0A000001,
                 60_000.0, (60, 220), (400, 4_000), (0, 6)),
    ClassProfile(ClassLabel.CAMERAS, (554, 8554), 17, 0x0A010500, 0x0A000001,
                 2_000.0, (400, 1400), (500, 8_000), (2, 40)),
    ClassProfile(ClassLabel.OTHERS, (80, 443, 123), 6, 0x0A010600, 0x0A000001,
                 8_000.0, (60, 1400), (100, 10_000), (0, 30)),
)


def gen_synthetic_iot_trace(
    class_profiles: Sequence[ClassProfile] = DEFAULT_IOT_PROFILES,
    packets_per_class: int = 1000,
    seed: int = 0,
) -> List[TraceRow]:
    """Deterministic labeled trace: packets_per_class rows per profile, merged
    into timestamp order. Rows carry their ground-truth ClassLabel."""
    seen_ports = set()
    for profile in class_profiles:
        overlap = seen_ports.intersection(profile.dst_ports)
        if overlap:
            raise OverlappingPortSets(f"ports {sorted(overlap)} used by more than one class")
        seen_ports.update(profile.dst_ports)

    rng = np.random.default_rng(seed)
    rows: List[TraceRow] = []
    for profile in class_profiles:
        gaps = rng.exponential(profile.mean_interarrival_us, packets_per_class)
        times = np.cumsum(gaps).astype(np.int64)
        dst_ports = rng.choice(profile.dst_ports, packets_per_class)
        src_ports = rng.integers(49152, 65536, packets_per_class)
        hosts = rng.integers(2, 30, packets_per_class)
        sizes = rng.integers(profile.size_range[0], profile.size_range[1] + 1, packets_per_class)
        intervals = rng.integers(
            profile.interval_time_range[0], profile.interval_time_range[1] + 1, packets_per_class
        )
        qdepths = rng.integers(profile.qdepth_range[0], profile.qdepth_range[1] + 1, packets_per_class)
        deq_depths = rng.integers(profile.qdepth_range[0], profile.qdepth_range[1] + 1, packets_per_class)
        for i in range(packets_per_class):
            interval = int(intervals[i])
            rows.append(
                TraceRow(
                    ingress_port=profile.ingress_port,
                    flow_interval_time=interval,
                    enq_qdepth=int(qdepths[i]),
                    deq_qdepth=int(deq_depths[i]),
                    deq_timedelta=min(interval, int(intervals[i]) // 2),
                    protocol=profile.protocol,
                    src_port=int(src_ports[i]),
                    dst_port=int(dst_ports[i]),
                    src_ip=profile.src_ip_base + int(hosts[i]),
                    dst_ip=profile.dst_ip,
                    timestamp_us=int(times[i]),
                    size_bytes=int(sizes[i]),
                    label=profile.label,
                )
            )
    rows.sort(key=lambda r: (r.timestamp_us, r.label.value))
    return rows


def label_map_entries(profiles: Iterable[ClassProfile]) -> dict:
    """Port-set → label entries matching a profile collection (Others excluded,
    it is the fallback)."""
    return {
        frozenset(p.dst_ports): p.label
        for p in profiles
        if p.label is not ClassLabel.OTHERS
    }
