"""Discrete-event scenario runner for the dumbbell topology.

Drives packets from the traffic generators through the bottleneck switch,
feeds mirrored telemetry to the collector, and (in the adjusted arm) runs
the classify-and-adjust control loop each epoch.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .adjuster import AdjustmentLog, ControlLoop, Policy, set_mirroring
from .collector import Collector, Dataset, PortLabelMap, export_dataset
from .config import ARMS, ScenarioConfig
from .errors import ConfigInvalid, IoFailure
from .ml.tree import DecisionTree
from .ml.features import featurize_rows, labels_of
from .model import FlowKey, Packet, SimTime
from .qoe import FlowStats, FrameLedger, accumulate, delivered_fps
from .switch import PriorityQueueBank, RegisterBank, Switch, SwitchPort
from .traffic import gen_cbr, gen_video, merge_streams

ARTIFACT_VERSION = 1

_ARRIVAL = 0
_PORT_FREE = 1
_EPOCH = 2


@dataclass
class ScenarioResult:
    arm: str
    seed: int
    config_hash: str
    video_fps: float
    flow_stats: Dict[FlowKey, FlowStats]
    dataset: Dataset
    log: AdjustmentLog
    adjustments: int
    injected: int
    delivered: int
    dropped: int
    mirrored: int
    artifact_paths: Dict[str, str] = field(default_factory=dict)


def run_scenario(
    config: ScenarioConfig,
    arm: str = "adjusted",
    seed: Optional[int] = None,
    outdir: Optional[str] = None,
) -> ScenarioResult:
    """Run one arm of the scenario to completion and optionally write the
    run artifacts (dataset, adjustment log, stats, report) to `outdir`.

    Identical (config, arm, seed) inputs produce byte-identical artifacts.
    """
    if arm not in ARMS:
        raise ConfigInvalid(f"arm must be one of {ARMS}, got {arm!r}")
    seed = config.seed if seed is None else seed
    run_id = f"{config.config_hash()}-{arm}-s{seed}"

    bank = RegisterBank(
        capacity=config.register_capacity,
        num_priorities=config.priority_levels,
    )
    queues = PriorityQueueBank(config.priority_levels, config.queue_capacity_pkts)
    port = SwitchPort(port_no=1, link_rate_bps=config.bottleneck_rate_bps)
    collector = Collector(
        PortLabelMap(config.label_entries),
        run_id=run_id,
        key_overrides=config.flow_labels,
    )
    switch = Switch(bank=bank, queues=queues, port=port, collector=collector)

    streams = [gen_video(config.video)]
    if arm != "baseline" and config.udp is not None:
        streams.append(gen_cbr(config.udp))
    packets = merge_streams(*streams)

    loop: Optional[ControlLoop] = None
    if arm == "adjusted":
        set_mirroring(switch, True, config.mirror_interval_us)
        policy = Policy(
            class_priority=dict(config.class_priority),
            epoch_us=config.epoch_us,
            min_confidence=config.min_confidence,
        )
        loop = ControlLoop(switch, policy)

    events: List[Tuple[int, int, int, object]] = []
    order = 0
    for pkt in packets:
        heapq.heappush(events, (pkt.created_at, order, _ARRIVAL, pkt))
        order += 1
    if loop is not None:
        t = config.epoch_us
        while t <= config.duration_us:
            heapq.heappush(events, (t, order, _EPOCH, None))
            order += 1
            t += config.epoch_us

    deliveries: List[Tuple[Packet, SimTime]] = []
    drops: List[Packet] = []
    ledger = FrameLedger()
    for pkt in packets:
        if pkt.key == config.video.key and pkt.frame_seq is not None:
            ledger.note_sent(pkt.frame_seq, pkt.created_at)

    adjustments = 0
    trained_rows = 0

    def try_service(now: SimTime) -> None:
        nonlocal order
        if port.busy_until > now:
            return
        result = switch.service(now)
        if result is not None:
            heapq.heappush(events, (result.egress_time, order, _PORT_FREE, result))
            order += 1

    while events:
        now, _, kind, payload = heapq.heappop(events)
        if kind == _ARRIVAL:
            entry = switch.process_arrival(payload, now)
            if entry is None:
                drops.append(payload)
            try_service(now)
        elif kind == _PORT_FREE:
            pkt = payload.entry.packet
            deliveries.append((pkt, payload.egress_time))
            if pkt.key == config.video.key and pkt.frame_seq is not None:
                ledger.note_delivered(pkt.frame_seq, payload.egress_time)
            try_service(now)
        else:  # _EPOCH
            rows = collector.dataset.rows
            if loop.classifier is None or len(rows) > trained_rows:
                labels = {int(r.label) for r in rows}
                if len(labels) >= 2:
                    tree = DecisionTree()
                    tree.fit(featurize_rows(rows), labels_of(rows))
                    loop.classifier = tree
                    trained_rows = len(rows)
            adjustments += loop.step(collector.dataset, now)

    stats = accumulate(packets, deliveries, drops, window_us=config.duration_us)
    fps = delivered_fps(ledger, config.duration_s, config.frame_deadline_us)

    result = ScenarioResult(
        arm=arm,
        seed=seed,
        config_hash=config.config_hash(),
        video_fps=fps,
        flow_stats=stats,
        dataset=collector.dataset,
        log=loop.log if loop is not None else AdjustmentLog(),
        adjustments=adjustments,
        injected=switch.injected,
        delivered=switch.delivered,
        dropped=queues.total_drops(),
        mirrored=switch.mirrored,
    )
    if outdir is not None:
        _write_artifacts(result, config, outdir)
    return result


def _repro_header(result: ScenarioResult) -> str:
    return (
        f"# config_hash={result.config_hash} seed={result.seed} "
        f"arm={result.arm} version={ARTIFACT_VERSION}\n"
    )


def _write_artifacts(result: ScenarioResult, config: ScenarioConfig, outdir: str) -> None:
    try:
        os.makedirs(outdir, exist_ok=True)

        dataset_path = os.path.join(outdir, "dataset.csv")
        export_dataset(result.dataset, dataset_path)

        adjust_path = os.path.join(outdir, "adjustments.csv")
        with open(adjust_path, "w", newline="") as handle:
            handle.write(_repro_header(result))
            result.log.export_csv(handle)

        stats_path = os.path.join(outdir, "stats.csv")
        with open(stats_path, "w", newline="") as handle:
            handle.write(_repro_header(result))
            handle.write(
                "src_ip,dst_ip,src_port,dst_port,protocol,sent,delivered,dropped,"
                "throughput_bps,mean_latency_us,p99_latency_us\n"
            )
            for key in sorted(result.flow_stats, key=lambda k: (k.src_ip, k.src_port)):
                st = result.flow_stats[key]
                handle.write(
                    f"{key.src_ip},{key.dst_ip},{key.src_port},{key.dst_port},{key.protocol},"
                    f"{st.sent},{st.delivered},{st.dropped},{st.throughput_bps:.3f},"
                    f"{st.mean_latency_us:.3f},{st.p99_latency_us:.3f}\n"
                )

        report_path = os.path.join(outdir, "report.txt")
        with open(report_path, "w") as handle:
            handle.write(_repro_header(result))
            handle.write(f"arm: {result.arm}\n")
            handle.write(f"video_delivered_fps: {result.video_fps:.4f}\n")
            handle.write(f"injected: {result.injected}\n")
            handle.write(f"delivered: {result.delivered}\n")
            handle.write(f"dropped: {result.dropped}\n")
            handle.write(f"mirrored_records: {result.mirrored}\n")
            handle.write(f"adjustments: {result.adjustments}\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc

    result.artifact_paths = {
        "dataset": os.path.join(outdir, "dataset.csv"),
        "adjustments": os.path.join(outdir, "adjustments.csv"),
        "stats": os.path.join(outdir, "stats.csv"),
        "report": os.path.join(outdir, "report.txt"),
    }
