"""Telemetry collector: labels mirrored records by destination port and
persists the labeled dataset as an append-only CSV file."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence

from .errors import (
    FieldOverflow,
    IoFailure,
    MissingLabel,
    OverlappingPortSets,
    SchemaMismatch,
    ValueOutOfRange,
)
from .model import ClassLabel, FALLBACK_LABEL, FlowKey
from .switch import TelemetryRecord
from .traffic import TraceRow

SCHEMA_VERSION = 1

COLUMNS = (
    "ingress_port",
    "flow_interval_time",
    "enq_qdepth",
    "deq_qdepth",
    "deq_timedelta",
    "protocol",
    "src_port",
    "dst_port",
    "src_ip",
    "dst_ip",
    "timestamp_us",
    "size_bytes",
    "label",
)


class PortLabelMap:
    """Destination-port sets mapped to class labels, with class 5 (Others)
    as the fixed fallback for unmatched ports."""

    def __init__(self, entries: Mapping[FrozenSet[int], ClassLabel]) -> None:
        seen = set()
        for ports, label in entries.items():
            overlap = seen.intersection(ports)
            if overlap:
                raise OverlappingPortSets(f"ports {sorted(overlap)} in more than one entry")
            seen.update(ports)
        self.fallback = FALLBACK_LABEL
        self._by_port: Dict[int, ClassLabel] = {}
        for ports, label in entries.items():
            for port in ports:
                self._by_port[port] = label

    def label_for(self, dst_port: int) -> ClassLabel:
        return self._by_port.get(dst_port, self.fallback)


@dataclass
class Dataset:
    """Append-only store of labeled rows plus run provenance."""

    run_id: str = ""
    schema_version: int = SCHEMA_VERSION
    rows: List[TraceRow] = field(default_factory=list)

    def append(self, row: TraceRow) -> None:
        if row.label is None:
            raise MissingLabel("dataset rows must be labeled")
        self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)


class Collector:
    """Receives mirrored telemetry, labels it, and appends to its dataset.

    `key_overrides` supplies explicit labels for flows (e.g. the video and
    UDP flows of a scenario) that a port map alone cannot describe.
    """

    def __init__(
        self,
        label_map: PortLabelMap,
        run_id: str = "",
        key_overrides: Optional[Mapping[FlowKey, ClassLabel]] = None,
    ) -> None:
        self.label_map = label_map
        self.dataset = Dataset(run_id=run_id)
        self.key_overrides = dict(key_overrides or {})

    def ingest(self, record: TelemetryRecord, timestamp_us: int, size_bytes: int) -> ClassLabel:
        override = self.key_overrides.get(record.flow_key())
        label = override if override is not None else self.label_map.label_for(record.dst_port)
        self.dataset.append(
            TraceRow(
                ingress_port=record.ingress_port,
                flow_interval_time=record.flow_interval_time,
                enq_qdepth=record.enq_qdepth,
                deq_qdepth=record.deq_qdepth,
                deq_timedelta=record.deq_timedelta,
                protocol=record.protocol,
                src_port=record.src_port,
                dst_port=record.dst_port,
                src_ip=record.src_ip,
                dst_ip=record.dst_ip,
                timestamp_us=timestamp_us,
                size_bytes=size_bytes,
                label=label,
            )
        )
        return label


def _write_rows(handle: io.TextIOBase, rows: Sequence[TraceRow], run_id: str) -> int:
    handle.write(f"# schema={SCHEMA_VERSION} run={run_id}\n")
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.ingress_port,
                row.flow_interval_time,
                row.enq_qdepth,
                row.deq_qdepth,
                row.deq_timedelta,
                row.protocol,
                row.src_port,
                row.dst_port,
                row.src_ip,
                row.dst_ip,
                row.timestamp_us,
                row.size_bytes,
                "" if row.label is None else int(row.label),
            ]
        )
    return len(rows)


def export_dataset(dataset: Dataset, destination) -> int:
    """Write the dataset as CSV; returns the number of data rows written."""
    return export_rows(dataset.rows, destination, run_id=dataset.run_id)


def export_rows(rows: Sequence[TraceRow], destination, run_id: str = "") -> int:
    if hasattr(destination, "write"):
        return _write_rows(destination, rows, run_id)
    try:
        with open(destination, "w", newline="") as handle:
            return _write_rows(handle, rows, run_id)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def read_trace(source, require_label: bool = False) -> List[TraceRow]:
    """Parse a trace/dataset CSV file into rows, validating bit widths.

    With require_label=True, unlabeled rows are rejected (dataset import).
    """
    return _read_source(source, require_label)[0]


def _read_source(source, require_label: bool):
    if hasattr(source, "read"):
        return _read_rows(source, require_label)
    try:
        with open(source, "r", newline="") as handle:
            return _read_rows(handle, require_label)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def _read_rows(handle, require_label: bool):
    run_id = ""
    first = handle.readline()
    if not first.startswith("#"):
        # No provenance comment; the line must be the header itself.
        header_line = first
    else:
        for token in first[1:].split():
            if token.startswith("run="):
                run_id = token[len("run="):]
        header_line = handle.readline()
    header = next(csv.reader([header_line])) if header_line.strip() else []
    if tuple(header) != COLUMNS:
        raise SchemaMismatch(f"expected columns {COLUMNS}, got {tuple(header)}")
    rows: List[TraceRow] = []
    for lineno, parts in enumerate(csv.reader(handle), start=1):
        if not parts:
            continue
        if len(parts) != len(COLUMNS):
            raise SchemaMismatch(f"row {lineno}: expected {len(COLUMNS)} fields, got {len(parts)}")
        label_text = parts[-1].strip()
        if label_text == "":
            if require_label:
                raise MissingLabel(f"row {lineno} has no label")
            label = None
        else:
            label = ClassLabel(int(label_text))
        try:
            values = [int(v) for v in parts[:-1]]
        except ValueError as exc:
            raise SchemaMismatch(f"row {lineno}: non-integer field ({exc})") from exc
        rows.append(TraceRow(*values, label=label))
    return rows, run_id


def import_dataset(source) -> Dataset:
    """Read a dataset file written by export_dataset; every row must be labeled.

    Provenance (run id) is recovered from the comment header, so
    export -> import -> export is a byte-identical round trip.
    """
    rows, run_id = _read_source(source, require_label=True)
    dataset = Dataset(run_id=run_id)
    for row in rows:
        dataset.append(row)
    return dataset
