"""flowtune: a desk-scale closed-loop network emulator.

A programmable-switch emulator stamps per-packet telemetry, mirrors records
to a collector, classifies flows with native supervised-ML classifiers, and
feeds priority updates back into the switch to meet QoS/QoE targets.
"""

from .model import (
    ClassLabel,
    FlowKey,
    Packet,
    SimTime,
    US_PER_SECOND,
    flow_key_of,
)
from .switch import (
    PriorityQueueBank,
    RegisterBank,
    Switch,
    SwitchPort,
    TelemetryRecord,
)
from .collector import Collector, Dataset, PortLabelMap, export_dataset, import_dataset
from .adjuster import AdjustmentLog, ControlLoop, Policy, decide, set_mirroring
from .config import ScenarioConfig, default_dumbbell_config, load_scenario
from .scenario import ScenarioResult, run_scenario

__version__ = "0.1.0"
