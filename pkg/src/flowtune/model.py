"""Shared domain types: simulated time, flow identity, packets, class labels.

All types here are immutable value objects. Time is an integer microsecond
tick count since simulation start; Python integers never wrap, so overflow
cannot occur silently.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .errors import FieldOverflow

# One simulated microsecond per tick.
SimTime = int
US_PER_SECOND = 1_000_000

# Type aliases for small-integer identities used throughout.
FlowId = int
PriorityLevel = int


def check_width(name: str, value: int, bits: int) -> int:
    """Validate that `value` is a non-negative integer fitting in `bits` bits.

    Out-of-range values are rejected, never truncated.
    """
    if not isinstance(value, int) or isinstance(value, bool):
        raise FieldOverflow(f"{name} must be an integer, got {value!r}")
    if value < 0 or value >= (1 << bits):
        raise FieldOverflow(f"{name}={value} does not fit in {bits} bits")
    return value


@dataclass(frozen=True)
class FlowKey:
    """5-tuple flow identity. Equality is field-wise."""

    src_ip: int
    dst_ip: int
    src_port: int
    dst_port: int
    protocol: int

    def __post_init__(self) -> None:
        check_width("src_ip", self.src_ip, 32)
        check_width("dst_ip", self.dst_ip, 32)
        check_width("src_port", self.src_port, 16)
        check_width("dst_port", self.dst_port, 16)
        check_width("protocol", self.protocol, 8)


@dataclass(frozen=True)
class Packet:
    """A simulated packet: header 5-tuple plus bookkeeping for the event loop.

    `frame_seq` groups packets of one video frame; `packet_seq` is the global
    emission order assigned when source streams are merged.
    """

    key: FlowKey
    size_bytes: int
    created_at: SimTime
    ingress_port: int = 1
    frame_seq: Optional[int] = None
    packet_seq: int = 0

    def __post_init__(self) -> None:
        if self.size_bytes < 1:
            raise FieldOverflow(f"size_bytes must be >= 1, got {self.size_bytes}")
        check_width("ingress_port", self.ingress_port, 9)
        if self.created_at < 0:
            raise FieldOverflow("created_at must be non-negative")


class ClassLabel(enum.IntEnum):
    """IoT traffic classes and their assigned numbers."""

    ENERGY = 0
    APPLIANCES = 1
    HUBS = 2
    HEALTH_MONITORS = 3
    CAMERAS = 4
    OTHERS = 5

    @property
    def display_name(self) -> str:
        return _CLASS_NAMES[self.value]

    @classmethod
    def from_name(cls, name: str) -> "ClassLabel":
        try:
            return cls(_CLASS_NAMES.index(name))
        except ValueError:
            raise ValueError(f"unknown class name: {name!r}") from None

    @classmethod
    def from_no(cls, class_no: int) -> "ClassLabel":
        return cls(class_no)


_CLASS_NAMES = ("Energy", "Appliances", "Hubs", "Health-Monitors", "Cameras", "Others")

# Class 5 is the designated fallback for unmatched traffic (non-IoT devices).
FALLBACK_LABEL = ClassLabel.OTHERS
NUM_CLASSES = len(_CLASS_NAMES)


def flow_key_of(packet: Packet) -> FlowKey:
    """Project a packet onto its 5-tuple flow identity."""
    return packet.key


def parse_ipv4(text: str) -> int:
    """Dotted-quad string to raw 32-bit integer (configuration boundary only)."""
    parts = text.strip().split(".")
    if len(parts) != 4:
        raise ValueError(f"not a dotted-quad IPv4 address: {text!r}")
    value = 0
    for part in parts:
        octet = int(part)
        if not 0 <= octet <= 255:
            raise ValueError(f"bad IPv4 octet in {text!r}")
        value = (value << 8) | octet
    return value


def format_ipv4(value: int) -> str:
    check_width("ipv4", value, 32)
    return ".".join(str((value >> shift) & 0xFF) for shift in (24, 16, 8, 0))
