"""Broadcast simulation for static ad-hoc networks: neighbor-topology
pruning (DP/TDP/PDP) with opportunistic XOR network coding on top."""

from .coding import Packet, PacketKind, SizeClass
from .engine import DtMode, LoadScenario, Scenario, run_broadcast
from .metrics import RunMetrics, class_gain, overall_gain
from .pruning import PruningProtocol, select_forwarders
from .topology import Topology, generate_random_topology, load_topology

__all__ = [
    "Packet", "PacketKind", "SizeClass",
    "DtMode", "LoadScenario", "Scenario", "run_broadcast",
    "RunMetrics", "class_gain", "overall_gain",
    "PruningProtocol", "select_forwarders",
    "Topology", "generate_random_topology", "load_topology",
]

__version__ = "0.1.0"
