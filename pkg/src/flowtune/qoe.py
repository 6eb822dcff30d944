"""Receiver-side measurement: per-flow delivery statistics, delivered frame
rate for framed streams, and the MSE/PSNR image-quality math."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionMismatch, ParseFailure, ValueOutOfRange
from .model import FlowKey, Packet, SimTime


@dataclass
class FlowStats:
    flow: FlowKey
    sent: int = 0
    delivered: int = 0
    dropped: int = 0
    delivered_bytes: int = 0
    throughput_bps: float = 0.0
    mean_latency_us: float = 0.0
    p99_latency_us: float = 0.0


def accumulate(
    sends: Iterable[Packet],
    deliveries: Iterable[Tuple[Packet, SimTime]],
    drops: Iterable[Packet],
    window_us: int,
) -> Dict[FlowKey, FlowStats]:
    """Exact per-flow counts plus throughput and latency over one run.

    Latency of a packet = egress completion - created_at; throughput =
    delivered bytes * 8 / observation window.
    """
    if window_us <= 0:
        raise ValueOutOfRange("window_us must be > 0")
    stats: Dict[FlowKey, FlowStats] = {}
    latencies: Dict[FlowKey, List[int]] = {}

    def entry(key: FlowKey) -> FlowStats:
        if key not in stats:
            stats[key] = FlowStats(flow=key)
            latencies[key] = []
        return stats[key]

    for pkt in sends:
        entry(pkt.key).sent += 1
    for pkt, egress_at in deliveries:
        st = entry(pkt.key)
        st.delivered += 1
        st.delivered_bytes += pkt.size_bytes
        latencies[pkt.key].append(egress_at - pkt.created_at)
    for pkt in drops:
        entry(pkt.key).dropped += 1

    for key, st in stats.items():
        st.throughput_bps = st.delivered_bytes * 8 * 1_000_000 / window_us
        lats = sorted(latencies[key])
        if lats:
            st.mean_latency_us = sum(lats) / len(lats)
            st.p99_latency_us = float(lats[max(0, math.ceil(0.99 * len(lats)) - 1)])
    return stats


@dataclass
class _Frame:
    expected: int = 0
    delivered: int = 0
    first_emission: Optional[SimTime] = None
    last_arrival: Optional[SimTime] = None


class FrameLedger:
    """Per-frame delivery accounting for one framed (video) flow."""

    def __init__(self) -> None:
        self.frames: Dict[int, _Frame] = {}

    def note_sent(self, frame_seq: int, emitted_at: SimTime) -> None:
        frame = self.frames.setdefault(frame_seq, _Frame())
        frame.expected += 1
        if frame.first_emission is None or emitted_at < frame.first_emission:
            frame.first_emission = emitted_at

    def note_delivered(self, frame_seq: int, arrived_at: SimTime) -> None:
        frame = self.frames.setdefault(frame_seq, _Frame())
        frame.delivered += 1
        if frame.last_arrival is None or arrived_at > frame.last_arrival:
            frame.last_arrival = arrived_at


def delivered_fps(ledger: FrameLedger, duration_s: float, deadline_us: int) -> float:
    """Frames whose every packet arrived within deadline_us of the frame's
    first-packet emission, divided by the observation duration."""
    if duration_s <= 0:
        raise ValueOutOfRange("duration_s must be > 0")
    complete = 0
    for frame in ledger.frames.values():
        if frame.expected == 0 or frame.delivered < frame.expected:
            continue
        if frame.last_arrival - frame.first_emission <= deadline_us:
            complete += 1
    return complete / duration_s


class PerfectMatch:
    """Sentinel for infinite PSNR (identical images). Compares greater than
    any finite PSNR value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "PerfectMatch"

    def __gt__(self, other) -> bool:
        return not isinstance(other, PerfectMatch)

    def __lt__(self, other) -> bool:
        return False


PERFECT_MATCH = PerfectMatch()


def _as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


def mse(f, g) -> float:
    """Mean squared intensity difference over an M x N grid."""
    fm = _as_matrix(f)
    gm = _as_matrix(g)
    if fm.shape != gm.shape:
        raise DimensionMismatch(f"shapes differ: {fm.shape} vs {gm.shape}")
    return float(((fm - gm) ** 2).mean())


def psnr(f, g) -> Union[float, PerfectMatch]:
    """10 * log10(255^2 / MSE), or the PerfectMatch sentinel when MSE is 0."""
    err = mse(f, g)
    if err == 0.0:
        return PERFECT_MATCH
    return 10.0 * math.log10(255.0**2 / err)


def load_image_csv(source) -> np.ndarray:
    """Comma-separated numeric grid -> matrix (one file per image)."""
    try:
        if hasattr(source, "read"):
            lines = source.read().splitlines()
        else:
            with open(source) as handle:
                lines = handle.read().splitlines()
    except OSError as exc:
        raise ParseFailure(str(exc)) from exc
    rows = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(v) for v in line.split(",")])
        except ValueError as exc:
            raise ParseFailure(f"bad numeric row {line!r}") from exc
    if not rows:
        raise ParseFailure("empty image file")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ParseFailure("ragged rows in image file")
    return np.array(rows)
