"""Scenario configuration: INI-style file describing the dumbbell topology,
traffic sources, labeling, policy, and mirroring settings."""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Tuple

from .errors import ConfigInvalid
from .model import ClassLabel, FlowKey, US_PER_SECOND, parse_ipv4
from .traffic import CbrSpec, VideoSpec

ARMS = ("baseline", "congested", "adjusted")


@dataclass
class ScenarioConfig:
    duration_s: float
    seed: int
    epoch_us: int
    bottleneck_rate_bps: int
    priority_levels: int
    queue_capacity_pkts: int
    register_capacity: int
    video: VideoSpec
    udp: Optional[CbrSpec]
    label_entries: Dict[FrozenSet[int], ClassLabel]
    flow_labels: Dict[FlowKey, ClassLabel]
    class_priority: Dict[ClassLabel, int]
    min_confidence: float
    mirror_interval_us: int
    frame_deadline_us: int
    raw_text: str = ""

    def config_hash(self) -> str:
        return hashlib.sha256(self.raw_text.encode()).hexdigest()[:16]

    @property
    def duration_us(self) -> int:
        return int(self.duration_s * US_PER_SECOND)


def _flow_key(section) -> FlowKey:
    return FlowKey(
        src_ip=parse_ipv4(section["src_ip"]),
        dst_ip=parse_ipv4(section["dst_ip"]),
        src_port=section.getint("src_port"),
        dst_port=section.getint("dst_port"),
        protocol=section.getint("protocol"),
    )


def parse_scenario_text(text: str) -> ScenarioConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigInvalid(f"cannot parse config: {exc}") from exc

    try:
        run = parser["run"]
        topo = parser["topology"]
        video_sec = parser["video"]
        duration_s = run.getfloat("duration_s")
        duration_us = int(duration_s * US_PER_SECOND)

        video = VideoSpec(
            key=_flow_key(video_sec),
            fps=video_sec.getint("fps"),
            packets_per_frame=video_sec.getint("packets_per_frame"),
            packet_size_bytes=video_sec.getint("packet_size_bytes"),
            start=int(video_sec.getfloat("start_s", 0.0) * US_PER_SECOND),
            duration=duration_us,
            ingress_port=video_sec.getint("ingress_port", 1),
        )
        video = _clip_duration(video, duration_us)

        udp = None
        if parser.has_section("udp"):
            udp_sec = parser["udp"]
            start = int(udp_sec.getfloat("start_s", 0.0) * US_PER_SECOND)
            udp = CbrSpec(
                key=_flow_key(udp_sec),
                rate_bps=udp_sec.getint("rate_bps"),
                packet_size_bytes=udp_sec.getint("packet_size_bytes"),
                start=start,
                duration=max(duration_us - start, 0),
                ingress_port=udp_sec.getint("ingress_port", 2),
            )

        label_entries: Dict[FrozenSet[int], ClassLabel] = {}
        if parser.has_section("labels"):
            for name, ports in parser["labels"].items():
                label = _class_by_loose_name(name)
                label_entries[frozenset(int(p) for p in ports.split(","))] = label

        flow_labels: Dict[FlowKey, ClassLabel] = {}
        # The video/UDP flows get explicit labels so non-trace traffic is
        # labelable even without a port-map hit.
        video_label = _class_by_loose_name(video_sec.get("label", "Cameras"))
        flow_labels[video.key] = video_label
        if udp is not None:
            flow_labels[udp.key] = _class_by_loose_name(parser["udp"].get("label", "Others"))

        class_priority: Dict[ClassLabel, int] = {}
        if parser.has_section("policy"):
            for name, level in parser["policy"].items():
                class_priority[_class_by_loose_name(name)] = int(level)

        mirroring = parser["mirroring"] if parser.has_section("mirroring") else {}

        config = ScenarioConfig(
            duration_s=duration_s,
            seed=run.getint("seed", 0),
            epoch_us=run.getint("epoch_us", 1_000_000),
            bottleneck_rate_bps=topo.getint("bottleneck_rate_bps"),
            priority_levels=topo.getint("priority_levels", 8),
            queue_capacity_pkts=topo.getint("queue_capacity_pkts", 64),
            register_capacity=topo.getint("register_capacity", 1024),
            video=video,
            udp=udp,
            label_entries=label_entries,
            flow_labels=flow_labels,
            class_priority=class_priority,
            min_confidence=float(parser["run"].get("min_confidence", "0.0")),
            mirror_interval_us=int(mirroring.get("interval_us", "0") if mirroring else "0"),
            frame_deadline_us=(
                parser["qoe"].getint("frame_deadline_us")
                if parser.has_section("qoe")
                else 2 * US_PER_SECOND // video.fps
            ),
            raw_text=text,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigInvalid(f"invalid scenario config: {exc}") from exc

    if config.duration_s <= 0:
        raise ConfigInvalid("duration_s must be > 0")
    if config.bottleneck_rate_bps <= 0:
        raise ConfigInvalid("bottleneck_rate_bps must be > 0")
    for label, level in config.class_priority.items():
        if not 0 <= level < config.priority_levels:
            raise ConfigInvalid(f"policy priority {level} out of range")
    return config


def _clip_duration(video: VideoSpec, duration_us: int) -> VideoSpec:
    from dataclasses import replace

    return replace(video, duration=max(duration_us - video.start, 0))


def _class_by_loose_name(name: str) -> ClassLabel:
    """Accept Table-style spellings case-insensitively (configparser lowers keys)."""
    canon = name.strip().lower().replace("_", "-")
    for label in ClassLabel:
        if label.display_name.lower() == canon:
            return label
    raise ConfigInvalid(f"unknown class name: {name!r}")


def load_scenario(path) -> ScenarioConfig:
    try:
        with open(path) as handle:
            return parse_scenario_text(handle.read())
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc


DEFAULT_DUMBBELL_CFG = """\
# Dumbbell scenario: video sender + UDP sender share a 2 Mbps bottleneck.
[run]
duration_s = 60
seed = 1
epoch_us = 1000000

[topology]
bottleneck_rate_bps = 2000000
priority_levels = 8
queue_capacity_pkts = 64
register_capacity = 1024

[video]
src_ip = 10.0.0.1
dst_ip = 10.0.0.3
src_port = 5004
dst_port = 5004
protocol = 17
fps = 30
packets_per_frame = 4
packet_size_bytes = 1000
start_s = 0
ingress_port = 1
label = Cameras

[udp]
src_ip = 10.0.0.2
dst_ip = 10.0.0.4
src_port = 6001
dst_port = 6001
protocol = 17
rate_bps = 2000000
packet_size_bytes = 1250
start_s = 10
ingress_port = 2
label = Others

[labels]
Cameras = 5004

[policy]
Cameras = 7

[mirroring]
interval_us = 10000

[qoe]
frame_deadline_us = 66666
"""


def default_dumbbell_config() -> ScenarioConfig:
    return parse_scenario_text(DEFAULT_DUMBBELL_CFG)
