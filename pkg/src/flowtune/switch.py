"""Deterministic emulation of a programmable switch.

Flow identification via register banks, strict-priority queueing over a
rate-limited egress port, egress telemetry stamping, and timer-gated cloning
of telemetry records to the collector.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, Optional, Tuple

from .errors import (
    CapacityExhausted,
    FieldOverflow,
    IndexOutOfRange,
    SinkUnavailable,
    UnknownRegister,
    ValueOutOfRange,
)
from .model import (
    ClassLabel,
    FlowId,
    FlowKey,
    Packet,
    PriorityLevel,
    SimTime,
    US_PER_SECOND,
    check_width,
)

DEFAULT_REGISTER_CAPACITY = 1024
DEFAULT_PRIORITY_LEVELS = 8
DEFAULT_QUEUE_CAPACITY = 64
DEFAULT_PRIORITY = 0


@dataclass(frozen=True)
class TelemetryRecord:
    """The ten per-packet features stamped at egress, plus the label slot.

    Field widths (bits): ingress_port 9, flow_interval_time 48, enq_qdepth 19,
    deq_qdepth 19, deq_timedelta 32, protocol 8, src/dst port 16, src/dst ip 32.
    """

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


class RegisterBank:
    """Register state: flow-ID map, per-flow priority, mirror flag/interval,
    and per-flow timer registers used to gate cloning."""

    def __init__(
        self,
        capacity: int = DEFAULT_REGISTER_CAPACITY,
        num_priorities: int = DEFAULT_PRIORITY_LEVELS,
        default_priority: PriorityLevel = DEFAULT_PRIORITY,
    ) -> None:
        if capacity < 1:
            raise ValueOutOfRange("register capacity must be >= 1")
        if not 0 <= default_priority < num_priorities:
            raise ValueOutOfRange("default priority outside queue range")
        self.capacity = capacity
        self.num_priorities = num_priorities
        self.default_priority = default_priority
        self.flow_ids: Dict[FlowKey, FlowId] = {}
        self.prio_reg: List[PriorityLevel] = [default_priority] * capacity
        self.last_seen: List[Optional[SimTime]] = [None] * capacity
        self.mirror_flag = False
        self.mirror_interval_us = 0

    def lookup_or_assign(self, key: FlowKey) -> FlowId:
        fid = self.flow_ids.get(key)
        if fid is not None:
            return fid
        if len(self.flow_ids) >= self.capacity:
            raise CapacityExhausted(f"register bank full ({self.capacity} flows)")
        fid = len(self.flow_ids)
        self.flow_ids[key] = fid
        self.prio_reg[fid] = self.default_priority
        self.last_seen[fid] = None
        return fid

    def flow_id(self, key: FlowKey) -> Optional[FlowId]:
        return self.flow_ids.get(key)

    def priority_of(self, fid: FlowId) -> PriorityLevel:
        self._check_index(fid)
        return self.prio_reg[fid]

    def write(self, name: str, value, index: Optional[FlowId] = None) -> None:
        """Control-plane register write. Takes effect for packets processed
        after the write, never retroactively."""
        if name == "prio_reg":
            if index is None:
                raise IndexOutOfRange("prio_reg write requires an index")
            self._check_index(index)
            if not isinstance(value, int) or not 0 <= value < self.num_priorities:
                raise ValueOutOfRange(f"priority {value!r} outside 0..{self.num_priorities - 1}")
            self.prio_reg[index] = value
        elif name == "mirror_flag":
            if not isinstance(value, bool):
                raise ValueOutOfRange("mirror_flag must be a boolean")
            self.mirror_flag = value
        elif name == "mirror_interval":
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueOutOfRange("mirror_interval must be a non-negative integer")
            self.mirror_interval_us = value
        else:
            raise UnknownRegister(name)

    def should_mirror(self, fid: FlowId, now: SimTime) -> bool:
        """Timer-gated mirror decision for one packet of flow `fid` at `now`.

        Interval 0 means per-packet mirroring. With a positive interval the
        per-flow timer register is updated only when a mirror fires, so the
        interval bounds the per-flow mirror rate.
        """
        self._check_index(fid)
        if not self.mirror_flag:
            return False
        if self.mirror_interval_us == 0:
            return True
        last = self.last_seen[fid]
        if last is None or now - last >= self.mirror_interval_us:
            self.last_seen[fid] = now
            return True
        return False

    def dump(self) -> dict:
        assigned = len(self.flow_ids)
        return {
            "capacity": self.capacity,
            "assigned_flows": assigned,
            "mirror_flag": self.mirror_flag,
            "mirror_interval_us": self.mirror_interval_us,
            "prio_reg": list(self.prio_reg[:assigned]),
            "last_seen": list(self.last_seen[:assigned]),
        }

    def _check_index(self, fid: FlowId) -> None:
        if not isinstance(fid, int) or not 0 <= fid < self.capacity:
            raise IndexOutOfRange(f"flow id {fid!r} outside capacity {self.capacity}")


@dataclass
class QueuedPacket:
    """A packet resident in a priority queue, with its enqueue metadata."""

    packet: Packet
    flow_id: FlowId
    priority: PriorityLevel
    ingress_at: SimTime
    enqueued_at: SimTime
    enq_qdepth: int
    mirror: bool = False


class PriorityQueueBank:
    """Bounded FIFO queues, one per priority level, with tail drop."""

    def __init__(
        self,
        levels: int = DEFAULT_PRIORITY_LEVELS,
        capacity_pkts: int = DEFAULT_QUEUE_CAPACITY,
    ) -> None:
        if levels < 1 or capacity_pkts < 1:
            raise ValueOutOfRange("queue bank needs >= 1 level and >= 1 slot")
        self.levels = levels
        self.capacity_pkts = capacity_pkts
        self.queues: List[Deque[QueuedPacket]] = [deque() for _ in range(levels)]
        self.drops = [0] * levels

    def enqueue(
        self,
        packet: Packet,
        prio: PriorityLevel,
        now: SimTime,
        *,
        flow_id: FlowId = 0,
        ingress_at: Optional[SimTime] = None,
        mirror: bool = False,
    ) -> Optional[QueuedPacket]:
        """Append at the tail of queue `prio`; returns None on tail drop."""
        if not 0 <= prio < self.levels:
            raise ValueOutOfRange(f"priority {prio} outside 0..{self.levels - 1}")
        queue = self.queues[prio]
        if len(queue) >= self.capacity_pkts:
            self.drops[prio] += 1
            return None
        entry = QueuedPacket(
            packet=packet,
            flow_id=flow_id,
            priority=prio,
            ingress_at=now if ingress_at is None else ingress_at,
            enqueued_at=now,
            enq_qdepth=len(queue),
            mirror=mirror,
        )
        queue.append(entry)
        return entry

    def occupancy(self) -> int:
        return sum(len(q) for q in self.queues)

    def total_drops(self) -> int:
        return sum(self.drops)

    def pop_highest(self) -> Optional[Tuple[QueuedPacket, int]]:
        """Remove the head of the highest-priority non-empty queue.

        Returns (entry, deq_qdepth) where deq_qdepth is the occupancy of that
        queue before removal.
        """
        for prio in range(self.levels - 1, -1, -1):
            queue = self.queues[prio]
            if queue:
                depth = len(queue)
                return queue.popleft(), depth
        return None


@dataclass
class SwitchPort:
    """Rate-limited egress port. `busy_until` is the current serialization end."""

    port_no: int
    link_rate_bps: int
    busy_until: SimTime = 0

    def __post_init__(self) -> None:
        check_width("port_no", self.port_no, 9)
        if self.link_rate_bps <= 0:
            raise ValueOutOfRange("link_rate_bps must be > 0")


def serialization_delay_us(size_bytes: int, link_rate_bps: int) -> int:
    """Whole-microsecond serialization delay, rounded up."""
    bits = size_bytes * 8
    return -(-bits * US_PER_SECOND // link_rate_bps)


@dataclass
class DequeueResult:
    entry: QueuedPacket
    deq_qdepth: int
    deq_timedelta: int
    egress_time: SimTime


def dequeue_next(queues: PriorityQueueBank, port: SwitchPort, now: SimTime) -> Optional[DequeueResult]:
    """Serve the head of the highest-priority non-empty queue at `now`.

    Advances `port.busy_until` to the egress completion time. Returns None if
    every queue is empty. Non-preemptive: callers must not invoke this while
    the port is serializing (now < busy_until).
    """
    popped = queues.pop_highest()
    if popped is None:
        return None
    entry, depth = popped
    delta = now - entry.enqueued_at
    egress = now + serialization_delay_us(entry.packet.size_bytes, port.link_rate_bps)
    port.busy_until = egress
    return DequeueResult(entry=entry, deq_qdepth=depth, deq_timedelta=delta, egress_time=egress)


def stamp_telemetry(
    entry: QueuedPacket,
    deq_qdepth: int,
    deq_timedelta: int,
    now: SimTime,
    label: Optional[ClassLabel] = None,
) -> TelemetryRecord:
    """Populate the full telemetry record at the egress stamping point.

    Raises FieldOverflow if any value exceeds its declared bit width.
    """
    key = entry.packet.key
    return TelemetryRecord(
        ingress_port=entry.packet.ingress_port,
        flow_interval_time=now - entry.ingress_at,
        enq_qdepth=entry.enq_qdepth,
        deq_qdepth=deq_qdepth,
        deq_timedelta=deq_timedelta,
        protocol=key.protocol,
        src_port=key.src_port,
        dst_port=key.dst_port,
        src_ip=key.src_ip,
        dst_ip=key.dst_ip,
        label=label,
    )


@dataclass
class ServiceResult:
    """One packet served through the egress pipeline."""

    entry: QueuedPacket
    egress_time: SimTime
    record: Optional[TelemetryRecord]  # stamped for every served packet
    mirrored: bool


class Switch:
    """Single-owner switch state machine driven by a discrete-event loop.

    Ties the register bank, the priority queue bank, and one egress port
    together, and clones telemetry records to an attached collector sink.
    """

    def __init__(
        self,
        bank: Optional[RegisterBank] = None,
        queues: Optional[PriorityQueueBank] = None,
        port: Optional[SwitchPort] = None,
        collector=None,
    ) -> None:
        self.bank = bank if bank is not None else RegisterBank()
        self.queues = queues if queues is not None else PriorityQueueBank(self.bank.num_priorities)
        self.port = port if port is not None else SwitchPort(port_no=1, link_rate_bps=2_000_000)
        self.collector = collector
        self.injected = 0
        self.delivered = 0
        self.stamped = 0
        self.mirrored = 0
        self.clone_drops = 0

    # -- data path -----------------------------------------------------

    def ingress(self, packet: Packet, now: SimTime) -> Tuple[FlowId, PriorityLevel, SimTime]:
        """Flow identification + priority readback at packet arrival."""
        fid = self.bank.lookup_or_assign(packet.key)
        return fid, self.bank.prio_reg[fid], now

    def process_arrival(self, packet: Packet, now: SimTime) -> Optional[QueuedPacket]:
        """Ingress pipeline: id/priority lookup, mirror decision, enqueue.

        Returns the queued entry, or None if the packet was tail-dropped.
        """
        fid, prio, ingress_at = self.ingress(packet, now)
        mirror = self.bank.should_mirror(fid, now)
        self.injected += 1
        return self.queues.enqueue(
            packet, prio, now, flow_id=fid, ingress_at=ingress_at, mirror=mirror
        )

    def service(self, now: SimTime) -> Optional[ServiceResult]:
        """Egress pipeline: dequeue, stamp telemetry, clone if flagged."""
        result = dequeue_next(self.queues, self.port, now)
        if result is None:
            return None
        record = stamp_telemetry(result.entry, result.deq_qdepth, result.deq_timedelta, now)
        self.stamped += 1
        self.delivered += 1
        mirrored = False
        if result.entry.mirror:
            mirrored = self.clone_to_collector(record, now, result.entry.packet.size_bytes)
        return ServiceResult(
            entry=result.entry,
            egress_time=result.egress_time,
            record=record,
            mirrored=mirrored,
        )

    def clone_to_collector(self, record: TelemetryRecord, now: SimTime, size_bytes: int) -> bool:
        """Deliver a cloned record to the collector; forwarding is unaffected.

        A detached collector drops the clone and bumps the counter (the data
        path never fails because of the monitoring path).
        """
        if self.collector is None:
            self.clone_drops += 1
            return False
        try:
            self.collector.ingest(record, timestamp_us=now, size_bytes=size_bytes)
        except SinkUnavailable:
            self.clone_drops += 1
            return False
        self.mirrored += 1
        return True

    # -- control endpoint ------------------------------------------------

    def write_register(self, name: str, value, index: Optional[FlowId] = None) -> None:
        self.bank.write(name, value, index=index)

    def dump_registers(self) -> dict:
        return self.bank.dump()
