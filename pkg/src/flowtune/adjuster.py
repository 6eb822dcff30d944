"""Control-plane loop: map classified traffic to priority levels via
operator policy and write register updates back into the switch."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ConfigInvalid, FlowtuneError, IoFailure
from .model import ClassLabel, FlowId, FlowKey, PriorityLevel, SimTime, parse_ipv4
from .ml.features import featurize
from .switch import Switch


@dataclass
class Policy:
    """Operator intent: class -> priority mapping, per-flow overrides, loop
    period, and a confidence gate below which no adjustment is made."""

    class_priority: Dict[ClassLabel, PriorityLevel] = field(default_factory=dict)
    flow_overrides: Dict[FlowKey, PriorityLevel] = field(default_factory=dict)
    epoch_us: int = 1_000_000
    min_confidence: float = 0.0

    def validate(self, num_priorities: int) -> None:
        for label, level in self.class_priority.items():
            if not 0 <= level < num_priorities:
                raise ConfigInvalid(f"priority {level} for {label.display_name} out of range")
        for key, level in self.flow_overrides.items():
            if not 0 <= level < num_priorities:
                raise ConfigInvalid(f"override priority {level} out of range")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ConfigInvalid("min_confidence must be in [0, 1]")
        if self.epoch_us < 1:
            raise ConfigInvalid("epoch_us must be >= 1")


def parse_policy(text: str) -> Policy:
    """Policy file format: `ClassName: level` lines, optional
    `min_confidence:`/`epoch_us:` settings, and flow overrides written as
    `srcip,dstip,sport,dport,proto -> level`."""
    policy = Policy()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if "->" in line:
                tuple_part, level_part = line.split("->")
                fields = [f.strip() for f in tuple_part.split(",")]
                if len(fields) != 5:
                    raise ValueError("override needs 5 header fields")
                key = FlowKey(
                    src_ip=parse_ipv4(fields[0]),
                    dst_ip=parse_ipv4(fields[1]),
                    src_port=int(fields[2]),
                    dst_port=int(fields[3]),
                    protocol=int(fields[4]),
                )
                policy.flow_overrides[key] = int(level_part)
            else:
                name, _, value = line.partition(":")
                name = name.strip()
                value = value.strip()
                if name == "min_confidence":
                    policy.min_confidence = float(value)
                elif name == "epoch_us":
                    policy.epoch_us = int(value)
                else:
                    policy.class_priority[ClassLabel.from_name(name)] = int(value)
        except (ValueError, FlowtuneError) as exc:
            raise ConfigInvalid(f"policy line {lineno}: {exc}") from exc
    return policy


def load_policy(path) -> Policy:
    try:
        with open(path) as handle:
            return parse_policy(handle.read())
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


@dataclass
class LogEntry:
    time: SimTime
    flow_id: FlowId
    old_priority: PriorityLevel
    new_priority: PriorityLevel
    predicted_class: ClassLabel
    confidence: float


class AdjustmentLog:
    """Append-only, time-ordered audit trail of register writes."""

    def __init__(self) -> None:
        self.entries: List[LogEntry] = []

    def append(self, entry: LogEntry) -> None:
        if self.entries and entry.time < self.entries[-1].time:
            raise ConfigInvalid("adjustment log entries must be time-ordered")
        self.entries.append(entry)

    def export_csv(self, destination) -> int:
        def write(handle) -> int:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(
                ["time_us", "flow_id", "old_priority", "new_priority", "predicted_class", "confidence"]
            )
            for e in self.entries:
                writer.writerow(
                    [e.time, e.flow_id, e.old_priority, e.new_priority,
                     e.predicted_class.display_name, repr(e.confidence)]
                )
            return len(self.entries)

        if hasattr(destination, "write"):
            return write(destination)
        try:
            with open(destination, "w", newline="") as handle:
                return write(handle)
        except OSError as exc:
            raise IoFailure(str(exc)) from exc


def decide(
    prediction: Tuple[ClassLabel, np.ndarray],
    key: FlowKey,
    policy: Policy,
) -> Optional[PriorityLevel]:
    """Priority for one classified flow, or None to leave it unchanged.

    Flow overrides win unconditionally; otherwise the predicted class maps
    through the policy, gated on the top score reaching min_confidence.
    """
    override = policy.flow_overrides.get(key)
    if override is not None:
        return override
    label, scores = prediction
    confidence = float(np.max(scores))
    if confidence < policy.min_confidence:
        return None
    return policy.class_priority.get(label)


def apply_priority(
    flow_id: FlowId,
    prio: PriorityLevel,
    switch: Switch,
    log: AdjustmentLog,
    now: SimTime,
    predicted: ClassLabel,
    confidence: float,
) -> None:
    """Write prio_reg[flow_id] and record the write (even if idempotent)."""
    old = switch.bank.priority_of(flow_id)
    switch.write_register("prio_reg", prio, index=flow_id)
    log.append(
        LogEntry(
            time=now,
            flow_id=flow_id,
            old_priority=old,
            new_priority=prio,
            predicted_class=predicted,
            confidence=confidence,
        )
    )


def set_mirroring(switch: Switch, flag: bool, interval_us: int = 0) -> None:
    """Turn mirroring on/off and set the per-flow clone interval."""
    switch.write_register("mirror_flag", flag)
    switch.write_register("mirror_interval", interval_us)


class ControlLoop:
    """Epoch-driven measure -> classify -> adjust cycle.

    Each step classifies the newest collector record per active flow and
    applies only priorities that differ from the register's current value.
    Per-flow errors are recorded and skipped; the loop never aborts a run.
    """

    def __init__(self, switch: Switch, policy: Policy, classifier=None) -> None:
        policy.validate(switch.bank.num_priorities)
        self.switch = switch
        self.policy = policy
        self.classifier = classifier
        self.log = AdjustmentLog()
        self.errors: List[str] = []
        self._cursor = 0

    def step(self, dataset, now: SimTime) -> int:
        """Process records appended since the previous epoch; returns the
        number of register writes made."""
        new_rows = dataset.rows[self._cursor :]
        self._cursor = len(dataset.rows)
        if not new_rows or self.classifier is None:
            return 0
        newest = {}
        for row in new_rows:
            newest[row.flow_key()] = row
        adjustments = 0
        for key, row in newest.items():
            try:
                fid = self.switch.bank.flow_id(key)
                if fid is None:
                    continue
                scores = self.classifier.predict_proba(featurize(row))[0]
                label = ClassLabel(int(np.argmax(scores)))
                prio = decide((label, scores), key, self.policy)
                if prio is None or prio == self.switch.bank.priority_of(fid):
                    continue
                apply_priority(
                    fid, prio, self.switch, self.log, now, label, float(np.max(scores))
                )
                adjustments += 1
            except FlowtuneError as exc:
                self.errors.append(f"t={now} flow={key}: {exc}")
        return adjustments
